#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpmode/calibrate.hpp"
#include "fpmode/fit.hpp"
#include "fpmode/model.hpp"
#include "fpmode/simulate.hpp"

namespace fpmode::io {

// Spectrum CSV: optional "# key = value" comment lines, then the header
// "wavelength_nm,intensity" and one sample per line ('.' decimal, UTF-8).
// Pixel-space files use the header "dx_cam_mm,intensity" plus a
// "# lambda_c_nm = <value>" comment and need a calibration to convert.
struct RawSpectrumFile {
    bool pixel_space = false;
    std::vector<double> axis; // wavelength_nm or dx_cam_mm
    std::vector<double> intensity;
    std::map<std::string, std::string> meta;
};

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum);
RawSpectrumFile read_spectrum_file(const std::filesystem::path& path);
Spectrum to_spectrum(const RawSpectrumFile& raw,
                     const std::optional<CzernyTurnerParams>& calibration = std::nullopt);

// Loss measurement CSV: header waveguide_id,length_mm,r_tilde,sigma,group_index
void write_measurements_csv(const std::filesystem::path& path,
                            const std::vector<LossMeasurement>& measurements);
std::vector<LossMeasurement> read_measurements_csv(const std::filesystem::path& path);

// Reference line CSV: header lambda_true_nm,lambda_c_nm,dx_cam_mm
void write_lines_csv(const std::filesystem::path& path,
                     const std::vector<LineObservation>& lines);
std::vector<LineObservation> read_lines_csv(const std::filesystem::path& path);

// JSON (de)serialization. Readers throw ConfigError naming the missing or
// invalid field.
nlohmann::json to_json(const DispersionModel& m);
nlohmann::json to_json(const ModeSpec& m);
nlohmann::json to_json(const ResonatorSpec& r);
nlohmann::json to_json(const InstrumentSpec& i);
nlohmann::json to_json(const ExposurePlan& p);
nlohmann::json to_json(const CzernyTurnerParams& p);

DispersionModel dispersion_from_json(const nlohmann::json& j, const std::string& where);
ModeSpec mode_from_json(const nlohmann::json& j, const std::string& where);
ResonatorSpec resonator_from_json(const nlohmann::json& j, const std::string& where);
InstrumentSpec instrument_from_json(const nlohmann::json& j, const std::string& where);
ExposurePlan plan_from_json(const nlohmann::json& j, const std::string& where);
CzernyTurnerParams czerny_params_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::json load_json(const std::filesystem::path& path);

/// Writes via a temporary file in the same directory, then renames.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);
void atomic_write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Lossless, locale-independent float formatting ("%.17g").
std::string format_double(double value);

} // namespace fpmode::io
