// Copyright 2026 The wpd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wpd/cli/config.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace wpd::cli {
namespace {

using json = nlohmann::json;

std::string pointer_escape(const std::string &key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

/// Byte offset of every key (and array element) in a JSON text, by JSON
/// pointer. Assumes the text already parsed successfully.
class LocationIndex {
  public:
    explicit LocationIndex(const std::string &text) : text_(text) {
        std::size_t pos = 0;
        value(pos, "");
    }

    /// Line and column (1-based) of `pointer`, or of its nearest located
    /// ancestor.
    std::pair<int, int> locate(std::string pointer) const {
        while (true) {
            if (const auto it = offsets_.find(pointer); it != offsets_.end()) {
                return line_col(text_, it->second);
            }
            if (pointer.empty()) {
                return {1, 1};
            }
            pointer.erase(pointer.rfind('/'));
        }
    }

    static std::pair<int, int> line_col(const std::string &text,
                                        std::size_t offset) {
        int line = 1;
        int col = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

  private:
    void skip_ws(std::size_t &pos) const {
        while (pos < text_.size() &&
               (text_[pos] == ' ' || text_[pos] == '\t' || text_[pos] == '\n' ||
                text_[pos] == '\r')) {
            ++pos;
        }
    }

    std::string string(std::size_t &pos) const {
        std::string out;
        ++pos; // opening quote
        while (pos < text_.size() && text_[pos] != '"') {
            if (text_[pos] == '\\' && pos + 1 < text_.size()) {
                ++pos;
                switch (text_[pos]) {
                case 'n':
                    out += '\n';
                    break;
                case 't':
                    out += '\t';
                    break;
                case 'u':
                    // Non-ASCII keys are never valid config keys; keep a
                    // placeholder so the pointer simply fails to match.
                    out += '?';
                    pos += 4;
                    break;
                default:
                    out += text_[pos];
                }
            } else {
                out += text_[pos];
            }
            ++pos;
        }
        ++pos; // closing quote
        return out;
    }

    void value(std::size_t &pos, const std::string &pointer) {
        skip_ws(pos);
        offsets_.emplace(pointer, pos);
        if (pos >= text_.size()) {
            return;
        }
        const char c = text_[pos];
        if (c == '{') {
            ++pos;
            skip_ws(pos);
            while (pos < text_.size() && text_[pos] != '}') {
                const std::size_t key_pos = pos;
                const std::string child =
                    pointer + "/" + pointer_escape(string(pos));
                offsets_.insert_or_assign(child, key_pos);
                skip_ws(pos);
                ++pos; // ':'
                std::size_t dummy = pos;
                skip_ws(dummy);
                value(pos, child);
                skip_ws(pos);
                if (pos < text_.size() && text_[pos] == ',') {
                    ++pos;
                    skip_ws(pos);
                }
            }
            ++pos;
        } else if (c == '[') {
            ++pos;
            skip_ws(pos);
            std::size_t index = 0;
            while (pos < text_.size() && text_[pos] != ']') {
                value(pos, pointer + "/" + std::to_string(index++));
                skip_ws(pos);
                if (pos < text_.size() && text_[pos] == ',') {
                    ++pos;
                    skip_ws(pos);
                }
            }
            ++pos;
        } else if (c == '"') {
            string(pos);
        } else {
            while (pos < text_.size() && text_[pos] != ',' &&
                   text_[pos] != '}' && text_[pos] != ']' &&
                   text_[pos] != ' ' && text_[pos] != '\n' &&
                   text_[pos] != '\r' && text_[pos] != '\t') {
                ++pos;
            }
        }
    }

    const std::string &text_;
    std::map<std::string, std::size_t> offsets_;
};

/// Error carrying only a JSON pointer; positioned by parse_config.
[[noreturn]] void fail(const std::string &pointer, const std::string &msg) {
    throw ConfigError("", 0, 0, pointer, msg);
}

void check_keys(const json &obj, const std::string &pointer,
                std::initializer_list<const char *> allowed) {
    if (!obj.is_object()) {
        fail(pointer, "expected an object");
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &[key, _] : obj.items()) {
        if (!ok.contains(key)) {
            std::string list;
            for (const char *a : allowed) {
                list += list.empty() ? "" : ", ";
                list += a;
            }
            fail(pointer + "/" + pointer_escape(key),
                 "unknown key '" + key + "' (allowed: " + list + ")");
        }
    }
}

double get_number(const json &v, const std::string &pointer) {
    if (!v.is_number()) {
        fail(pointer, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        fail(pointer, "expected a finite number");
    }
    return d;
}

std::uint64_t get_uint(const json &v, const std::string &pointer) {
    if (!v.is_number_unsigned() &&
        !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        fail(pointer, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool get_bool(const json &v, const std::string &pointer) {
    if (!v.is_boolean()) {
        fail(pointer, "expected true or false");
    }
    return v.get<bool>();
}

std::string get_string(const json &v, const std::string &pointer) {
    if (!v.is_string()) {
        fail(pointer, "expected a string");
    }
    return v.get<std::string>();
}

/// Number, list of numbers, or {"start", "stop", "points"} (inclusive).
std::vector<double> get_grid(const json &v, const std::string &pointer,
                             double unit) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(get_number(v, pointer) * unit);
    } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(get_number(v[i], pointer + "/" + std::to_string(i)) *
                          unit);
        }
    } else if (v.is_object()) {
        check_keys(v, pointer, {"start", "stop", "points"});
        for (const char *k : {"start", "stop", "points"}) {
            if (!v.contains(k)) {
                fail(pointer, std::string("grid needs '") + k + "'");
            }
        }
        const double a = get_number(v["start"], pointer + "/start");
        const double b = get_number(v["stop"], pointer + "/stop");
        const auto n = get_uint(v["points"], pointer + "/points");
        if (n < 1 || n > 100000) {
            fail(pointer + "/points", "points must lie in [1, 100000]");
        }
        for (std::uint64_t i = 0; i < n; ++i) {
            const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            out.push_back((a + t * (b - a)) * unit);
        }
    } else {
        fail(pointer, "expected a number, a list, or {start, stop, points}");
    }
    return out;
}

double get_unit(const json &root, const char *key) {
    if (!root.contains(key)) {
        return 1.0;
    }
    const std::string pointer = std::string("/") + key;
    const std::string u = get_string(root[key], pointer);
    if (u == "rad") {
        return 1.0;
    }
    if (u == "pi") {
        return std::numbers::pi;
    }
    fail(pointer, "units must be \"rad\" or \"pi\"");
}

NoiseParams get_noise(const json &v, const std::string &pointer) {
    if (v.is_string()) {
        if (v.get<std::string>() != "ideal") {
            fail(pointer, "expected \"ideal\" or an object");
        }
        return NoiseParams::ideal();
    }
    check_keys(v, pointer, {"epsilon", "T", "gamma"});
    NoiseParams p = NoiseParams::ideal();
    if (v.contains("epsilon")) {
        p.epsilon = get_number(v["epsilon"], pointer + "/epsilon");
    }
    if (v.contains("T")) {
        p.T = get_number(v["T"], pointer + "/T");
    }
    if (v.contains("gamma")) {
        p.gamma = get_number(v["gamma"], pointer + "/gamma");
    }
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        std::string field = "epsilon";
        if (!(p.T > 0.0 && p.T < 1.0)) {
            field = "T";
        } else if (!(p.gamma >= 0.0 && p.gamma <= 2.0)) {
            field = "gamma";
        }
        fail(pointer + "/" + field, e.what());
    }
    return p;
}

constexpr const char *kParamNames[3] = {"epsilon", "T", "gamma"};

ParamMask get_free(const json &v, const std::string &pointer) {
    ParamMask m{false, false, false};
    if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto p = pointer + "/" + std::to_string(i);
            const std::string name = get_string(v[i], p);
            bool found = false;
            for (std::size_t k = 0; k < 3; ++k) {
                if (name == kParamNames[k]) {
                    m[k] = true;
                    found = true;
                }
            }
            if (!found) {
                fail(p, "unknown parameter '" + name +
                            "' (expected epsilon, T or gamma)");
            }
        }
        return m;
    }
    check_keys(v, pointer, {"epsilon", "T", "gamma"});
    m = {true, true, true};
    for (std::size_t k = 0; k < 3; ++k) {
        if (v.contains(kParamNames[k])) {
            m[k] = get_bool(v[kParamNames[k]],
                            pointer + "/" + std::string(kParamNames[k]));
        }
    }
    return m;
}

Experiment get_experiment(const json &v, const std::string &pointer) {
    const std::string name = get_string(v, pointer);
    for (Experiment e :
         {Experiment::Fringes, Experiment::SweepTheta, Experiment::EstimateVP,
          Experiment::Fit, Experiment::OracleCheck}) {
        if (name == experiment_name(e)) {
            return e;
        }
    }
    fail(pointer, "unknown experiment '" + name +
                      "' (expected fringes, sweep_theta, estimate_vp, fit or "
                      "oracle_check)");
}

ExperimentConfig from_json(const json &root) {
    check_keys(root, "",
               {"experiment", "N", "theta", "theta_units", "phases",
                "phase_units", "quantities", "shots", "seed", "noise", "fit",
                "oracle_samples", "vp_cap", "output_dir", "plots"});
    if (!root.contains("experiment")) {
        fail("", "missing required key 'experiment'");
    }
    if (!root.contains("theta")) {
        fail("", "missing required key 'theta'");
    }
    ExperimentConfig c;
    c.experiment = get_experiment(root["experiment"], "/experiment");
    if (root.contains("N")) {
        const auto n = get_uint(root["N"], "/N");
        if (n > kMaxPaths) {
            fail("/N", "N must not exceed " + std::to_string(kMaxPaths));
        }
        c.N = static_cast<unsigned>(n);
    }
    c.theta = get_grid(root["theta"], "/theta", get_unit(root, "theta_units"));
    if (root.contains("phases")) {
        const json &ph = root["phases"];
        if (ph.is_object() && ph.size() == 1 && ph.contains("points")) {
            const auto n = get_uint(ph["points"], "/phases/points");
            if (n > 100000) {
                fail("/phases/points", "too many phase points");
            }
            c.phases = default_phi_grid(static_cast<unsigned>(n));
        } else {
            c.phases = get_grid(ph, "/phases", get_unit(root, "phase_units"));
        }
    } else if (c.experiment == Experiment::Fringes) {
        c.phases = default_phi_grid();
    }
    if (root.contains("quantities")) {
        const json &q = root["quantities"];
        if (!q.is_array()) {
            fail("/quantities", "expected a list such as [\"V_C\", \"D\"]");
        }
        c.quantities.clear();
        for (std::size_t i = 0; i < q.size(); ++i) {
            const auto p = "/quantities/" + std::to_string(i);
            try {
                c.quantities.push_back(parse_observable(get_string(q[i], p)));
            } catch (const std::invalid_argument &e) {
                fail(p, e.what());
            }
        }
    }
    if (root.contains("shots")) {
        c.shots = get_uint(root["shots"], "/shots");
    }
    if (root.contains("seed")) {
        c.seed = get_uint(root["seed"], "/seed");
    }
    if (root.contains("noise")) {
        c.noise = get_noise(root["noise"], "/noise");
    }
    if (root.contains("fit")) {
        const json &f = root["fit"];
        check_keys(f, "/fit",
                   {"free", "initial_guess", "multistarts", "uniform_weights",
                    "seed", "observations"});
        if (f.contains("free")) {
            c.fit.free = get_free(f["free"], "/fit/free");
        }
        if (f.contains("initial_guess")) {
            c.fit.initial_guess =
                get_noise(f["initial_guess"], "/fit/initial_guess");
        }
        if (f.contains("multistarts")) {
            const auto m = get_uint(f["multistarts"], "/fit/multistarts");
            if (m < 1 || m > 1000) {
                fail("/fit/multistarts", "multistarts must lie in [1, 1000]");
            }
            c.fit.multistarts = static_cast<unsigned>(m);
        }
        if (f.contains("uniform_weights")) {
            c.fit.uniform_weights =
                get_bool(f["uniform_weights"], "/fit/uniform_weights");
        }
        if (f.contains("seed")) {
            c.fit.seed = get_uint(f["seed"], "/fit/seed");
        }
        if (f.contains("observations")) {
            c.fit.observations =
                get_string(f["observations"], "/fit/observations");
        }
    }
    if (root.contains("oracle_samples")) {
        c.oracle_samples = get_uint(root["oracle_samples"], "/oracle_samples");
    }
    if (root.contains("vp_cap")) {
        const auto cap = get_uint(root["vp_cap"], "/vp_cap");
        if (cap > 24) {
            fail("/vp_cap", "vp_cap must not exceed 24");
        }
        c.vp_cap = static_cast<unsigned>(cap);
    }
    if (root.contains("output_dir")) {
        c.output_dir = get_string(root["output_dir"], "/output_dir");
    }
    if (root.contains("plots")) {
        c.plots = get_bool(root["plots"], "/plots");
    }
    validate(c);
    return c;
}

} // namespace

const char *experiment_name(Experiment e) {
    switch (e) {
    case Experiment::Fringes:
        return "fringes";
    case Experiment::SweepTheta:
        return "sweep_theta";
    case Experiment::EstimateVP:
        return "estimate_vp";
    case Experiment::Fit:
        return "fit";
    case Experiment::OracleCheck:
        return "oracle_check";
    }
    return "?";
}

ConfigError::ConfigError(const std::string &source, int line, int column,
                         const std::string &path, const std::string &message)
    : std::runtime_error(
          (source.empty() ? std::string() : source + ":") +
          (line > 0 ? std::to_string(line) + ":" + std::to_string(column) + ": "
                    : std::string()) +
          (path.empty() ? std::string() : path + ": ") + message),
      line_(line), column_(column), path_(path) {}

void validate(const ExperimentConfig &c) {
    if (c.N < 2 || !std::has_single_bit(c.N)) {
        fail("/N", "N must be a power of two >= 2, got " + std::to_string(c.N));
    }
    if (c.theta.empty()) {
        fail("/theta", "at least one theta value is required");
    }
    try {
        c.noise.validate();
    } catch (const std::invalid_argument &e) {
        fail("/noise", e.what());
    }
    if (c.experiment != Experiment::Fringes && !c.phases.empty()) {
        fail("/phases", "phases only apply to the fringes experiment");
    }
    const bool needs_quantities = c.experiment == Experiment::SweepTheta ||
                                  c.experiment == Experiment::Fit;
    if (needs_quantities && c.quantities.empty()) {
        fail("/quantities", "at least one quantity is required");
    }
    const bool uses_vp =
        c.experiment == Experiment::EstimateVP ||
        c.experiment == Experiment::OracleCheck ||
        (needs_quantities && std::find(c.quantities.begin(), c.quantities.end(),
                                       Observable::VP) != c.quantities.end());
    if (needs_quantities && c.N != 2 &&
        std::find(c.quantities.begin(), c.quantities.end(), Observable::VF) !=
            c.quantities.end()) {
        fail("/quantities",
             "V_F is a two-path fringe visibility; N = " + std::to_string(c.N));
    }
    if (uses_vp && c.N > c.vp_cap) {
        fail("/N", "V_P enumerates 2^N settings; N = " + std::to_string(c.N) +
                       " exceeds vp_cap = " + std::to_string(c.vp_cap));
    }
    switch (c.experiment) {
    case Experiment::Fringes:
        if (c.N != 2) {
            fail("/N", "fringes need N = 2");
        }
        if (c.phases.size() < 8) {
            fail("/phases", "fringes need at least 8 phase points");
        }
        break;
    case Experiment::OracleCheck:
        if (c.oracle_samples < 1) {
            fail("/oracle_samples", "need at least one phase sample");
        }
        break;
    case Experiment::Fit: {
        const auto n_free = static_cast<std::size_t>(
            std::count(c.fit.free.begin(), c.fit.free.end(), true));
        if (n_free == 0) {
            fail("/fit/free", "at least one parameter must be free");
        }
        try {
            c.fit.initial_guess.validate();
        } catch (const std::invalid_argument &e) {
            fail("/fit/initial_guess", e.what());
        }
        if (c.fit.observations.empty() &&
            c.theta.size() * c.quantities.size() < n_free) {
            fail("/theta", "fewer data points than free parameters");
        }
        break;
    }
    case Experiment::SweepTheta:
    case Experiment::EstimateVP:
        break;
    }
    if (c.output_dir.empty()) {
        fail("/output_dir", "output directory must not be empty");
    }
}

ExperimentConfig parse_config(const std::string &text,
                              const std::string &source) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = LocationIndex::line_col(text, offset);
        std::string msg = e.what();
        // Drop the library's "[json.exception.parse_error.101] " prefix.
        if (const auto p = msg.find("] "); p != std::string::npos) {
            msg = msg.substr(p + 2);
        }
        throw ConfigError(source, line, col, "", msg);
    }
    try {
        return from_json(root);
    } catch (const ConfigError &e) {
        const LocationIndex index(text);
        const auto [line, col] = index.locate(e.path());
        std::string msg = e.what();
        if (!e.path().empty()) {
            msg = msg.substr(e.path().size() + 2);
        }
        throw ConfigError(source, line, col, e.path(), msg);
    }
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string(), 0, 0, "", "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

nlohmann::ordered_json to_json(const ExperimentConfig &c) {
    nlohmann::ordered_json j;
    auto noise = [](const NoiseParams &p) {
        nlohmann::ordered_json n;
        n["epsilon"] = p.epsilon;
        n["T"] = p.T;
        n["gamma"] = p.gamma;
        return n;
    };
    j["experiment"] = experiment_name(c.experiment);
    j["N"] = c.N;
    j["theta"] = c.theta;
    j["theta_units"] = "rad";
    j["phases"] = c.phases;
    j["phase_units"] = "rad";
    auto &q = j["quantities"] = nlohmann::ordered_json::array();
    for (Observable o : c.quantities) {
        q.push_back(observable_name(o));
    }
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["noise"] = noise(c.noise);
    auto &f = j["fit"];
    for (std::size_t k = 0; k < 3; ++k) {
        f["free"][kParamNames[k]] = c.fit.free[k];
    }
    f["initial_guess"] = noise(c.fit.initial_guess);
    f["multistarts"] = c.fit.multistarts;
    f["uniform_weights"] = c.fit.uniform_weights;
    f["seed"] = c.fit.seed;
    f["observations"] = c.fit.observations;
    j["oracle_samples"] = c.oracle_samples;
    j["vp_cap"] = c.vp_cap;
    j["output_dir"] = c.output_dir;
    j["plots"] = c.plots;
    return j;
}

void apply_overrides(ExperimentConfig &c, const Overrides &o) {
    if (o.output_dir) {
        c.output_dir = *o.output_dir;
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (o.ideal) {
        c.noise = NoiseParams::ideal();
    }
    validate(c);
}

} // namespace wpd::cli
