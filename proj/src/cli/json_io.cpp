#include "json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "prony/errors.hpp"

namespace prony::cli {

namespace {

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) throw InputError(where.empty() ? "/" : where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end())
        throw InputError(where.empty() ? "/" : where, "missing required field \"" + key + "\"");
    return *it;
}

const Json* optional(const Json& obj, const std::string& key) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double real_from(const Json& v, const std::string& where) {
    if (!v.is_number()) throw InputError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InputError(where, "number is not finite");
    return x;
}

Index count_from(const Json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InputError(where, "expected a non-negative integer");
    const auto x = v.get<long long>();
    if (x < 0) throw InputError(where, "expected a non-negative integer");
    return static_cast<Index>(x);
}

const Json& array_from(const Json& v, const std::string& where) {
    if (!v.is_array()) throw InputError(where, "expected an array");
    return v;
}

ComplexVector complex_vector_from(const Json& v, const std::string& where) {
    const Json& arr = array_from(v, where);
    ComplexVector out(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) out(static_cast<Index>(i)) = complex_from_json(arr[i], child(where, i));
    return out;
}

/// Row-major nested array of complex numbers.
ComplexMatrix complex_matrix_from(const Json& v, const std::string& where) {
    const Json& rows = array_from(v, where);
    if (rows.empty()) throw InputError(where, "matrix has no rows");
    const std::size_t cols = array_from(rows[0], child(where, 0)).size();
    ComplexMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string rw = child(where, i);
        const Json& row = array_from(rows[i], rw);
        if (row.size() != cols)
            throw InputError(rw, "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<Index>(i), static_cast<Index>(j)) = complex_from_json(row[j], child(rw, j));
    }
    return m;
}

TFShift shift_from(const Json& v, const std::string& where) {
    const Json& arr = array_from(v, where);
    if (arr.size() != 2) throw InputError(where, "expected [t, nu]");
    return {real_from(arr[0], child(where, 0)), real_from(arr[1], child(where, 1))};
}

Json shift_to_json(const TFShift& p) { return Json::array({p.t, p.nu}); }

RealShiftCombination parse_classic_setup(const Json& setup, const std::string& where) {
    RealShiftCombination shift;
    if (const Json* terms = optional(setup, "shift")) {
        const std::string w = child(where, "shift");
        const Json& arr = array_from(*terms, w);
        if (arr.empty()) throw InputError(w, "shift combination needs at least one term");
        shift.terms.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string tw = child(w, i);
            shift.terms.push_back({complex_from_json(require(arr[i], "b", tw), child(tw, "b")),
                                   real_from(require(arr[i], "g", tw), child(tw, "g"))});
        }
    }
    return shift;
}

ChannelProbeSetup parse_channel_setup(const Json& setup, const std::string& where) {
    ChannelProbeSetup out = ChannelProbeSetup::standard();
    if (const Json* probes = optional(setup, "probes")) {
        const std::string w = child(where, "probes");
        const Json& arr = array_from(*probes, w);
        if (arr.empty()) throw InputError(w, "at least one probe is required");
        out.probes.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) out.probes.push_back(shift_from(arr[i], child(w, i)));
    }
    if (const Json* terms = optional(setup, "shift_terms")) {
        const std::string w = child(where, "shift_terms");
        const Json& arr = array_from(*terms, w);
        if (arr.empty()) throw InputError(w, "at least one shift term is required");
        out.shift_terms.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string tw = child(w, i);
            const cplx b = complex_from_json(require(arr[i], "b", tw), child(tw, "b"));
            if (b == cplx{}) throw InputError(child(tw, "b"), "coefficient must be nonzero");
            out.shift_terms.push_back({b, shift_from(require(arr[i], "g", tw), child(tw, "g"))});
        }
    }
    return out;
}

DynamicalProblem parse_dynamical_setup(const Json& setup, const std::string& where) {
    DynamicalProblem p;
    p.A = complex_matrix_from(require(setup, "A", where), child(where, "A"));
    const Index d = p.A.rows();
    if (p.A.cols() != d) throw InputError(child(where, "A"), "matrix must be square");

    const std::string bw = child(where, "basis");
    const Json& chains = array_from(require(setup, "basis", where), bw);
    for (std::size_t i = 0; i < chains.size(); ++i) {
        const std::string cw = child(bw, i);
        GeneralizedEigenbasis::Chain chain;
        chain.lambda = complex_from_json(require(chains[i], "lambda", cw), child(cw, "lambda"));
        const std::string vw = child(cw, "vectors");
        const Json& vectors = array_from(require(chains[i], "vectors", cw), vw);
        if (vectors.empty()) throw InputError(vw, "chain needs at least one vector");
        for (std::size_t j = 0; j < vectors.size(); ++j) {
            ComplexVector v = complex_vector_from(vectors[j], child(vw, j));
            if (v.size() != d) throw InputError(child(vw, j), "vector length differs from the dimension of A");
            chain.vectors.push_back(std::move(v));
        }
        p.basis.chains.push_back(std::move(chain));
    }

    p.sample_basis = ComplexMatrix::Identity(d, d);
    if (const Json* sb = optional(setup, "sample_basis")) {
        const std::string w = child(where, "sample_basis");
        if (sb->is_string()) {
            const auto name = sb->get<std::string>();
            if (name == "fourier")
                p.sample_basis = fourier_basis(d);
            else if (name != "standard")
                throw InputError(w, "expected \"standard\", \"fourier\" or a matrix");
        } else {
            p.sample_basis = complex_matrix_from(*sb, w);
            if (p.sample_basis.rows() != d) throw InputError(w, "sample basis has the wrong number of rows");
        }
    }

    const std::string iw = child(where, "I");
    const Json& idx = array_from(require(setup, "I", where), iw);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const Index s = count_from(idx[i], child(iw, i));
        if (s >= p.sample_basis.cols()) throw InputError(child(iw, i), "index is out of range");
        p.I.push_back(s);
    }
    if (const Json* beta = optional(setup, "beta")) p.beta = real_from(*beta, child(where, "beta"));

    try {
        p.validate();
    } catch (const ContractViolation& e) {
        throw InputError(where, e.what());
    }
    return p;
}

template <class Point, class GammaParser>
SparseSignalModel<Point> parse_model(const Json& truth, const std::string& where, GammaParser gamma_from) {
    SparseSignalModel<Point> model;
    const std::string mw = child(where, "modes");
    const Json& modes = array_from(require(truth, "modes", where), mw);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string w = child(mw, i);
        Point g = gamma_from(require(modes[i], "gamma", w), child(w, "gamma"));
        ComplexVector c = complex_vector_from(require(modes[i], "coeffs", w), child(w, "coeffs"));
        if (c.size() == 0) throw InputError(child(w, "coeffs"), "coefficient vector is empty");
        model.modes.push_back({std::move(g), std::move(c)});
    }
    return model;
}

void require_scalar_coeffs(const auto& model, const std::string& where) {
    for (std::size_t i = 0; i < model.modes.size(); ++i)
        if (model.modes[i].coeffs.size() != 1)
            throw InputError(where + "/modes/" + std::to_string(i) + "/coeffs", "expected exactly one coefficient");
}

GroundTruth parse_truth(const Json& truth, const Problem& p, const std::string& where) {
    switch (p.kind) {
        case InstanceKind::Classic: {
            auto m = parse_model<Frequency>(truth, where, real_from);
            require_scalar_coeffs(m, where);
            return ClassicTruth{std::move(m), std::get<RealShiftCombination>(p.setup)};
        }
        case InstanceKind::Confluent: {
            const Index D = std::get<ConfluentSetup>(p.setup).D;
            auto m = parse_model<Frequency>(truth, where, real_from);
            for (std::size_t i = 0; i < m.modes.size(); ++i)
                if (m.modes[i].coeffs.size() > D + 1)
                    throw InputError(where + "/modes/" + std::to_string(i) + "/coeffs", "polynomial degree exceeds D");
            return ConfluentTruth{to_polynomial_modes(m)};
        }
        case InstanceKind::Dynamical: {
            const auto& prob = std::get<DynamicalProblem>(p.setup);
            auto m = parse_model<cplx>(truth, where, complex_from_json);
            try {
                (void)initial_state(prob, m);
            } catch (const ContractViolation& e) {
                throw InputError(child(where, "modes"), e.what());
            }
            return DynamicalTruth{prob, std::move(m)};
        }
        case InstanceKind::Channel: {
            auto m = parse_model<TFShift>(truth, where, shift_from);
            require_scalar_coeffs(m, where);
            return ChannelTruth{std::move(m), std::get<ChannelProbeSetup>(p.setup)};
        }
    }
    throw InputError(where, "unknown instance kind");
}

const char* const tolerance_keys[] = {"rank_rel_tol",     "zero_root_tol",    "root_match_tol",
                                      "root_cluster_tol", "annihilation_tol", "coeff_drop_tol"};

double* tolerance_slot(RecoveryConfig& cfg, const std::string& key) {
    if (key == "rank_rel_tol") return &cfg.rank_rel_tol;
    if (key == "zero_root_tol") return &cfg.zero_root_tol;
    if (key == "root_match_tol") return &cfg.root_match_tol;
    if (key == "root_cluster_tol") return &cfg.root_cluster_tol;
    if (key == "annihilation_tol") return &cfg.annihilation_tol;
    if (key == "coeff_drop_tol") return &cfg.coeff_drop_tol;
    return nullptr;
}

}  // namespace

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading " + path);
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    out.flush();
    if (!out) throw IoError("error while writing " + path);
}

Json parse_document(const std::string& text, const std::string& path) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.byte is one past the offending character.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw InputError(path + ":" + std::to_string(line) + ":" + std::to_string(col), msg);
    }
}

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& v, const std::string& where) {
    if (v.is_number()) return {real_from(v, where), 0.0};
    if (v.is_array() && v.size() == 2) return {real_from(v[0], child(where, 0)), real_from(v[1], child(where, 1))};
    throw InputError(where, "expected a complex number [re, im] or a real number");
}

InstanceKind parse_kind(const Json& doc) {
    const Json& k = require(doc, "kind", "");
    if (!k.is_string()) throw InputError("/kind", "expected a string");
    const auto name = k.get<std::string>();
    if (name == "classic") return InstanceKind::Classic;
    if (name == "confluent") return InstanceKind::Confluent;
    if (name == "dynamical") return InstanceKind::Dynamical;
    if (name == "channel") return InstanceKind::Channel;
    throw InputError("/kind", "unknown kind \"" + name + "\" (expected classic, confluent, dynamical or channel)");
}

std::string kind_name(InstanceKind k) {
    switch (k) {
        case InstanceKind::Classic: return "classic";
        case InstanceKind::Confluent: return "confluent";
        case InstanceKind::Dynamical: return "dynamical";
        case InstanceKind::Channel: return "channel";
    }
    return "unknown";
}

void apply_config_overrides(RecoveryConfig& cfg, const Json& overrides, const std::string& where) {
    if (!overrides.is_object()) throw InputError(where, "expected an object");
    for (const auto& [key, value] : overrides.items()) {
        const std::string w = child(where, key);
        if (key == "kappa") {
            cfg.kappa = count_from(value, w);
        } else if (key == "M") {
            cfg.M = count_from(value, w);
        } else if (double* slot = tolerance_slot(cfg, key)) {
            *slot = real_from(value, w);
        } else {
            throw InputError(w, "unknown configuration field \"" + key + "\"");
        }
    }
}

void apply_tolerance_override(RecoveryConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const std::string where = "--tolerance " + assignment;
    if (eq == std::string::npos) throw InputError(where, "expected key=value");
    const std::string key = assignment.substr(0, eq);
    double* slot = tolerance_slot(cfg, key);
    if (slot == nullptr) {
        std::string known;
        for (const char* k : tolerance_keys) known += (known.empty() ? "" : ", ") + std::string(k);
        throw InputError(where, "unknown tolerance \"" + key + "\" (known: " + known + ")");
    }
    const std::string text = assignment.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(value)) throw InputError(where, "value is not a number");
    *slot = value;
}

Problem parse_problem(const Json& doc, bool need_config) {
    Problem p;
    p.doc = doc;
    p.kind = parse_kind(doc);

    static const Json empty = Json::object();
    const Json* setup = optional(doc, "setup");
    const Json& s = setup != nullptr ? *setup : empty;
    if (!s.is_object()) throw InputError("/setup", "expected an object");
    switch (p.kind) {
        case InstanceKind::Classic: p.setup = parse_classic_setup(s, "/setup"); break;
        case InstanceKind::Confluent: p.setup = ConfluentSetup{count_from(require(s, "D", "/setup"), "/setup/D")}; break;
        case InstanceKind::Dynamical: p.setup = parse_dynamical_setup(s, "/setup"); break;
        case InstanceKind::Channel: p.setup = parse_channel_setup(s, "/setup"); break;
    }

    // Submodule dimension defaults follow the instance; an explicit M must agree for confluent data.
    if (p.kind == InstanceKind::Dynamical) p.config.M = std::get<DynamicalProblem>(p.setup).basis.max_chain_length();
    const Json* cfg = optional(doc, "config");
    const Json& c = cfg != nullptr ? *cfg : empty;
    if (need_config) require(c, "kappa", "/config");
    apply_config_overrides(p.config, c, "/config");
    if (p.kind == InstanceKind::Confluent) {
        const Index want = std::get<ConfluentSetup>(p.setup).D + 1;
        if (optional(c, "M") != nullptr && p.config.M != want)
            throw InputError("/config/M", "confluent data requires M = D + 1 = " + std::to_string(want));
        p.config.M = want;
    }

    if (const Json* L = optional(doc, "L")) {
        p.L = count_from(*L, "/L");
        if (*p.L < 1) throw InputError("/L", "L must be at least 1");
    }
    if (const Json* sigma = optional(doc, "noise_sigma")) {
        p.noise_sigma = real_from(*sigma, "/noise_sigma");
        if (p.noise_sigma < 0.0) throw InputError("/noise_sigma", "noise level must be non-negative");
    }
    if (const Json* seed = optional(doc, "seed")) {
        if (!seed->is_number_unsigned()) throw InputError("/seed", "expected a non-negative integer");
        p.seed = seed->get<std::uint64_t>();
    }
    if (const Json* truth = optional(doc, "truth")) p.truth = parse_truth(*truth, p, "/truth");
    if (const Json* meas = optional(doc, "measurements")) {
        ComplexMatrix values = complex_matrix_from(*meas, "/measurements");
        if (values.rows() < 2) throw InputError("/measurements", "need at least two measurement rows");
        Index expected_S = 1;
        if (p.kind == InstanceKind::Dynamical) expected_S = static_cast<Index>(std::get<DynamicalProblem>(p.setup).I.size());
        if (p.kind == InstanceKind::Channel)
            expected_S = static_cast<Index>(std::get<ChannelProbeSetup>(p.setup).probes.size());
        if (values.cols() != expected_S)
            throw InputError("/measurements", "rows have " + std::to_string(values.cols()) + " channels, setup implies " +
                                                  std::to_string(expected_S));
        p.measurements.emplace(std::move(values));
    }
    return p;
}

Json measurements_to_json(const MeasurementRecord& rec) {
    Json rows = Json::array();
    for (Index l = 0; l < rec.values().rows(); ++l) {
        Json row = Json::array();
        for (Index s = 0; s < rec.values().cols(); ++s) row.push_back(complex_to_json(rec.values()(l, s)));
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {
Json coeffs_to_json(const ComplexVector& c) {
    Json arr = Json::array();
    for (Index i = 0; i < c.size(); ++i) arr.push_back(complex_to_json(c(i)));
    return arr;
}
}  // namespace

Json mode_to_json(const Mode<Frequency>& m) { return Json{{"gamma", m.gamma}, {"coeffs", coeffs_to_json(m.coeffs)}}; }
Json mode_to_json(const Mode<cplx>& m) {
    return Json{{"gamma", complex_to_json(m.gamma)}, {"coeffs", coeffs_to_json(m.coeffs)}};
}
Json mode_to_json(const Mode<TFShift>& m) {
    return Json{{"gamma", shift_to_json(m.gamma)}, {"coeffs", coeffs_to_json(m.coeffs)}};
}

Json config_to_json(const RecoveryConfig& cfg) {
    return Json{{"kappa", cfg.kappa},
                {"M", cfg.M},
                {"rank_rel_tol", cfg.rank_rel_tol},
                {"zero_root_tol", cfg.zero_root_tol},
                {"root_match_tol", cfg.root_match_tol},
                {"root_cluster_tol", cfg.root_cluster_tol},
                {"annihilation_tol", cfg.annihilation_tol},
                {"coeff_drop_tol", cfg.coeff_drop_tol}};
}

}  // namespace prony::cli
