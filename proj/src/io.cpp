#include "fpmode/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "fpmode/errors.hpp"

namespace fpmode::io {

namespace {

using nlohmann::json;

double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("missing or invalid field: " + where + "." + key);
    return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number())
        throw ConfigError("invalid field: " + key);
    return j[key].get<double>();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        size_t a = field.find_first_not_of(" \t\r");
        size_t b = field.find_last_not_of(" \t\r");
        fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw DataError("cannot parse number '" + s + "' in " + where);
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::string> meta;
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open file: " + path.string());
    CsvTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            size_t eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                std::string value = line.substr(eq + 1);
                auto trim = [](std::string& s) {
                    size_t a = s.find_first_not_of(" \t");
                    size_t b = s.find_last_not_of(" \t");
                    s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
                };
                trim(key);
                trim(value);
                table.meta[key] = value;
            }
            continue;
        }
        if (!header_seen) {
            table.header = split_csv_line(line);
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields)
            row.push_back(parse_double(f, path.string()));
        table.rows.push_back(std::move(row));
    }
    if (!header_seen)
        throw DataError("file has no header: " + path.string());
    return table;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    static std::mt19937_64 rng(std::random_device{}());
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(rng() & 0xffffff);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw DataError("cannot write file: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

void atomic_write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    atomic_write_text(path, j.dump(2) + "\n");
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum) {
    std::ostringstream out;
    if (spectrum.exposure_center_nm)
        out << "# exposure_center_nm = " << format_double(*spectrum.exposure_center_nm) << "\n";
    if (!spectrum.source_tag.empty())
        out << "# source = " << spectrum.source_tag << "\n";
    for (const auto& w : spectrum.warnings)
        out << "# warning = " << w << "\n";
    out << "wavelength_nm,intensity\n";
    for (size_t i = 0; i < spectrum.size(); ++i)
        out << format_double(spectrum.wavelength_nm[i]) << ','
            << format_double(spectrum.intensity[i]) << '\n';
    atomic_write_text(path, out.str());
}

RawSpectrumFile read_spectrum_file(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    if (table.header.size() != 2 || table.header[1] != "intensity")
        throw DataError("expected a two-column spectrum CSV in " + path.string());
    RawSpectrumFile raw;
    raw.meta = table.meta;
    if (table.header[0] == "wavelength_nm")
        raw.pixel_space = false;
    else if (table.header[0] == "dx_cam_mm")
        raw.pixel_space = true;
    else
        throw DataError("unknown spectrum axis column '" + table.header[0] + "'");
    for (const auto& row : table.rows) {
        if (row.size() != 2)
            throw DataError("malformed spectrum row in " + path.string());
        raw.axis.push_back(row[0]);
        raw.intensity.push_back(row[1]);
    }
    return raw;
}

Spectrum to_spectrum(const RawSpectrumFile& raw,
                     const std::optional<CzernyTurnerParams>& calibration) {
    Spectrum out;
    if (!raw.pixel_space) {
        out.wavelength_nm = raw.axis;
        out.intensity = raw.intensity;
    } else {
        if (!calibration)
            throw ConfigError("pixel-space spectrum needs a calibration");
        auto it = raw.meta.find("lambda_c_nm");
        if (it == raw.meta.end())
            throw DataError("pixel-space spectrum lacks a '# lambda_c_nm = ...' comment");
        double lambda_c = parse_double(it->second, "lambda_c_nm");
        out.wavelength_nm.reserve(raw.axis.size());
        for (double dx : raw.axis)
            out.wavelength_nm.push_back(czerny_turner_wavelength(*calibration, lambda_c, dx));
        out.intensity = raw.intensity;
        if (out.wavelength_nm.size() >= 2 && out.wavelength_nm.front() > out.wavelength_nm.back()) {
            std::reverse(out.wavelength_nm.begin(), out.wavelength_nm.end());
            std::reverse(out.intensity.begin(), out.intensity.end());
        }
        out.exposure_center_nm = lambda_c;
    }
    auto center = raw.meta.find("exposure_center_nm");
    if (center != raw.meta.end())
        out.exposure_center_nm = parse_double(center->second, "exposure_center_nm");
    auto source = raw.meta.find("source");
    if (source != raw.meta.end())
        out.source_tag = source->second;
    validate(out);
    return out;
}

void write_measurements_csv(const std::filesystem::path& path,
                            const std::vector<LossMeasurement>& measurements) {
    std::ostringstream out;
    out << "waveguide_id,length_mm,r_tilde,sigma,group_index\n";
    for (const auto& m : measurements)
        out << m.waveguide_id << ',' << format_double(m.length_mm) << ','
            << format_double(m.r_tilde) << ',' << format_double(m.sigma) << ','
            << format_double(m.group_index) << '\n';
    atomic_write_text(path, out.str());
}

std::vector<LossMeasurement> read_measurements_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open file: " + path.string());
    std::vector<LossMeasurement> out;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() < 4)
            throw DataError("measurement rows need at least 4 columns in " + path.string());
        LossMeasurement m;
        m.waveguide_id = fields[0];
        m.length_mm = parse_double(fields[1], path.string());
        m.r_tilde = parse_double(fields[2], path.string());
        m.sigma = parse_double(fields[3], path.string());
        m.group_index = fields.size() > 4 && !fields[4].empty()
                            ? parse_double(fields[4], path.string())
                            : 0.0;
        out.push_back(std::move(m));
    }
    return out;
}

void write_lines_csv(const std::filesystem::path& path,
                     const std::vector<LineObservation>& lines) {
    std::ostringstream out;
    out << "lambda_true_nm,lambda_c_nm,dx_cam_mm\n";
    for (const auto& l : lines)
        out << format_double(l.lambda_true_nm) << ',' << format_double(l.lambda_c_nm) << ','
            << format_double(l.dx_cam_mm) << '\n';
    atomic_write_text(path, out.str());
}

std::vector<LineObservation> read_lines_csv(const std::filesystem::path& path) {
    CsvTable table = read_csv(path);
    if (table.header.size() != 3)
        throw DataError("expected a three-column line CSV in " + path.string());
    std::vector<LineObservation> out;
    for (const auto& row : table.rows) {
        if (row.size() != 3)
            throw DataError("malformed line row in " + path.string());
        out.push_back({row[0], row[1], row[2]});
    }
    return out;
}

nlohmann::json to_json(const DispersionModel& m) {
    return json{{"beta_ref", m.beta_ref}, {"c0", m.c0}, {"c1", m.c1}, {"c2", m.c2}};
}

nlohmann::json to_json(const ModeSpec& m) {
    return json{{"label", m.label},
                {"dispersion", to_json(m.dispersion)},
                {"k", m.k},
                {"reflectivity_R", m.reflectivity_R},
                {"facet_phase_phi", m.facet_phase_phi},
                {"excitation_x", m.excitation_x}};
}

nlohmann::json to_json(const ResonatorSpec& r) {
    json modes = json::array();
    for (const auto& m : r.modes)
        modes.push_back(to_json(m));
    return json{{"length_mm", r.length_mm}, {"modes", modes}};
}

nlohmann::json to_json(const InstrumentSpec& i) {
    json j{{"pixel_pitch_pm", i.pixel_pitch_pm},
           {"psf_fwhm_pm", i.psf_fwhm_pm},
           {"envelope_center_nm", i.envelope_center_nm},
           {"envelope_fwhm_nm", i.envelope_fwhm_nm},
           {"noise_sigma", i.noise_sigma},
           {"rng_seed", i.rng_seed}};
    if (i.etalon)
        j["etalon"] = json{{"fsr_nm", i.etalon->fsr_nm},
                           {"modulation_depth", i.etalon->modulation_depth}};
    return j;
}

nlohmann::json to_json(const ExposurePlan& p) {
    return json{{"central_wavelengths_nm", p.central_wavelengths_nm},
                {"span_nm", p.span_nm},
                {"overlap_nm", p.overlap_nm}};
}

nlohmann::json to_json(const CzernyTurnerParams& p) {
    return json{{"gamma_rad", p.gamma_rad},
                {"focal_mm", p.focal_mm},
                {"groove_spacing_nm", p.groove_spacing_nm},
                {"order_m", p.order_m},
                {"dx_in_mm", p.dx_in_mm}};
}

DispersionModel dispersion_from_json(const nlohmann::json& j, const std::string& where) {
    DispersionModel m;
    if (j.contains("beta_ref"))
        m.beta_ref = require_number(j, "beta_ref", where);
    else if (j.contains("lambda_ref_nm"))
        m.beta_ref = wavelength_to_wavenumber(require_number(j, "lambda_ref_nm", where));
    else
        throw ConfigError("missing field: " + where + ".beta_ref (or lambda_ref_nm)");
    m.c0 = require_number(j, "c0", where);
    m.c1 = number_or(j, "c1", 0.0);
    m.c2 = number_or(j, "c2", 0.0);
    return m;
}

ModeSpec mode_from_json(const nlohmann::json& j, const std::string& where) {
    ModeSpec m;
    m.label = j.value("label", "");
    if (!j.contains("dispersion"))
        throw ConfigError("missing field: " + where + ".dispersion");
    m.dispersion = dispersion_from_json(j["dispersion"], where + ".dispersion");
    m.k = number_or(j, "k", 0.0);
    m.reflectivity_R = require_number(j, "reflectivity_R", where);
    m.facet_phase_phi = number_or(j, "facet_phase_phi", 0.0);
    m.excitation_x = number_or(j, "excitation_x", 1.0);
    return m;
}

ResonatorSpec resonator_from_json(const nlohmann::json& j, const std::string& where) {
    ResonatorSpec r;
    r.length_mm = require_number(j, "length_mm", where);
    if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty())
        throw ConfigError("missing or empty field: " + where + ".modes");
    int index = 0;
    for (const auto& mj : j["modes"]) {
        ModeSpec m = mode_from_json(mj, where + ".modes[" + std::to_string(index) + "]");
        if (m.label.empty())
            m.label = "mode" + std::to_string(index + 1);
        r.modes.push_back(std::move(m));
        ++index;
    }
    return r;
}

InstrumentSpec instrument_from_json(const nlohmann::json& j, const std::string& where) {
    InstrumentSpec i;
    i.pixel_pitch_pm = require_number(j, "pixel_pitch_pm", where);
    i.psf_fwhm_pm = number_or(j, "psf_fwhm_pm", 0.0);
    i.envelope_center_nm = number_or(j, "envelope_center_nm", 0.0);
    i.envelope_fwhm_nm = number_or(j, "envelope_fwhm_nm", 0.0);
    i.noise_sigma = number_or(j, "noise_sigma", 0.0);
    if (j.contains("rng_seed")) {
        if (!j["rng_seed"].is_number_integer() && !j["rng_seed"].is_number_unsigned())
            throw ConfigError("invalid field: " + where + ".rng_seed");
        i.rng_seed = j["rng_seed"].get<unsigned long long>();
    }
    if (j.contains("etalon") && !j["etalon"].is_null()) {
        EtalonSpec e;
        e.fsr_nm = require_number(j["etalon"], "fsr_nm", where + ".etalon");
        e.modulation_depth = require_number(j["etalon"], "modulation_depth", where + ".etalon");
        i.etalon = e;
    }
    return i;
}

ExposurePlan plan_from_json(const nlohmann::json& j, const std::string& where) {
    ExposurePlan p;
    if (!j.contains("central_wavelengths_nm") || !j["central_wavelengths_nm"].is_array() ||
        j["central_wavelengths_nm"].empty())
        throw ConfigError("missing or empty field: " + where + ".central_wavelengths_nm");
    for (const auto& c : j["central_wavelengths_nm"]) {
        if (!c.is_number())
            throw ConfigError("invalid field: " + where + ".central_wavelengths_nm");
        p.central_wavelengths_nm.push_back(c.get<double>());
    }
    p.span_nm = require_number(j, "span_nm", where);
    p.overlap_nm = number_or(j, "overlap_nm", 0.0);
    return p;
}

CzernyTurnerParams czerny_params_from_json(const nlohmann::json& j, const std::string& where) {
    CzernyTurnerParams p;
    p.gamma_rad = require_number(j, "gamma_rad", where);
    p.focal_mm = require_number(j, "focal_mm", where);
    p.groove_spacing_nm = require_number(j, "groove_spacing_nm", where);
    if (!j.contains("order_m") || !j["order_m"].is_number_integer())
        throw ConfigError("missing or invalid field: " + where + ".order_m");
    p.order_m = j["order_m"].get<int>();
    p.dx_in_mm = number_or(j, "dx_in_mm", 0.0);
    return p;
}

nlohmann::json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace fpmode::io
