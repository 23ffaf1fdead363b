#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include <json.hpp>

#include "prony/oracle.hpp"

namespace prony::cli {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input. `where` is a JSON pointer or file:line:col.
class InputError : public std::runtime_error {
public:
    InputError(std::string where, const std::string& what)
        : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// Parses `text`; syntax errors are reported as path:line:column.
Json parse_document(const std::string& text, const std::string& path);

Json complex_to_json(cplx z);
cplx complex_from_json(const Json& v, const std::string& where);

enum class InstanceKind { Classic, Confluent, Dynamical, Channel };

InstanceKind parse_kind(const Json& doc);
std::string kind_name(InstanceKind k);

struct ConfluentSetup {
    Index D = 0;
};

using Setup = std::variant<RealShiftCombination, ConfluentSetup, DynamicalProblem, ChannelProbeSetup>;

/// Parsed problem or measurement file. `doc` keeps the original document so
/// that synth can echo it with measurements attached.
struct Problem {
    Json doc;
    InstanceKind kind = InstanceKind::Classic;
    Setup setup;
    RecoveryConfig config;
    std::optional<Index> L;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::optional<GroundTruth> truth;
    std::optional<MeasurementRecord> measurements;
};

/// `need_config` is false for commands that only look at the setup.
Problem parse_problem(const Json& doc, bool need_config = true);

/// Applies the fields present in `overrides` (same schema as the "config" block,
/// every field optional) to `cfg`.
void apply_config_overrides(RecoveryConfig& cfg, const Json& overrides, const std::string& where);

/// key=value for one of the tolerance fields.
void apply_tolerance_override(RecoveryConfig& cfg, const std::string& assignment);

Json measurements_to_json(const MeasurementRecord& rec);

Json mode_to_json(const Mode<Frequency>& m);
Json mode_to_json(const Mode<cplx>& m);
Json mode_to_json(const Mode<TFShift>& m);

template <class Point>
Json model_to_json(const SparseSignalModel<Point>& model) {
    Json modes = Json::array();
    for (const auto& m : model.modes) modes.push_back(mode_to_json(m));
    return Json{{"modes", std::move(modes)}};
}

Json config_to_json(const RecoveryConfig& cfg);

}  // namespace prony::cli
