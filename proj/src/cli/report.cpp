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

#include "wpd/cli/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "wpd/cli/experiments.hpp"
#include "wpd/noise.hpp"

namespace wpd::cli {
namespace {

using json = nlohmann::json;

std::optional<double> number_at(const json &j, const char *key,
                                const char *field) {
    if (!j.contains(key)) {
        return std::nullopt;
    }
    const json &v = j[key];
    if (v.is_object() && v.contains(field) && v[field].is_number()) {
        return v[field].get<double>();
    }
    return std::nullopt;
}

std::optional<double> number(const json &j, const char *key) {
    if (j.contains(key) && j[key].is_number()) {
        return j[key].get<double>();
    }
    return std::nullopt;
}

std::string fixed(double v, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string cell(const std::optional<double> &v,
                 const std::optional<double> &err) {
    if (!v) {
        return "-";
    }
    if (err && *err > 0 && std::isfinite(*err)) {
        return format_uncertainty(*v, *err);
    }
    return fixed(*v, 6);
}

std::string sci(const std::optional<double> &v) {
    if (!v) {
        return "-";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%+.2e", *v);
    return buf;
}

std::string pad(const std::string &s, std::size_t w) {
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

json load(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ReportError(path.string() + ": cannot open");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ReportError(path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("schema")) {
        throw ReportError(path.string() + ": missing \"schema\" field");
    }
    if (doc["schema"] != kResultsSchema) {
        throw ReportError(path.string() + ": schema mismatch, expected \"" +
                          std::string(kResultsSchema) + "\", found " +
                          doc["schema"].dump());
    }
    if (!doc.contains("records") || !doc["records"].is_array() ||
        !doc.contains("experiment") || !doc["experiment"].is_string()) {
        throw ReportError(path.string() +
                          ": schema mismatch, missing records or experiment");
    }
    return doc;
}

} // namespace

Report build_report(const std::vector<std::filesystem::path> &files) {
    if (files.empty()) {
        throw ReportError("no result files given");
    }
    std::vector<json> docs;
    for (const auto &f : files) {
        docs.push_back(load(f));
    }
    Report report;
    for (std::size_t i = 0; i < files.size(); ++i) {
        const json &doc = docs[i];
        for (const json &r : doc["records"]) {
            if (!r.is_object() || !r.contains("theta") ||
                !r["theta"].is_number()) {
                throw ReportError(files[i].string() +
                                  ": schema mismatch, record without theta");
            }
            ReportRow row;
            row.file = files[i].string();
            row.experiment = doc["experiment"].get<std::string>();
            row.N = r.value("N", 0U);
            row.theta = r["theta"].get<double>();
            row.D = number_at(r, "D", "value");
            row.D_err = number_at(r, "D", "std_error");
            row.V_C = number_at(r, "V_C", "value");
            row.V_C_err = number_at(r, "V_C", "std_error");
            row.V_P = number_at(r, "V_P", "value");
            row.V_P_err = number_at(r, "V_P", "std_error");
            row.residual_equality = number(r, "residual_equality");
            row.residual_inequality = number(r, "residual_inequality");
            if (r.value("expect_relations", false)) {
                const double tol = number(r, "tolerance").value_or(1e-10);
                const double tol_order =
                    number(r, "tolerance_order").value_or(1e-10);
                if (row.residual_equality &&
                    std::abs(*row.residual_equality) > tol) {
                    row.flags.push_back("D^2+V_P^2 off by " +
                                        sci(row.residual_equality));
                }
                if (row.V_C && row.V_P && *row.V_C > *row.V_P + tol_order) {
                    row.flags.push_back("V_C > V_P");
                }
            }
            report.flagged += row.flags.empty() ? 0 : 1;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

std::string format_report(const Report &report) {
    std::ostringstream os;
    os << pad("experiment", 13) << pad("N", 4) << pad("theta/pi", 10)
       << pad("D", 14) << pad("V_C", 14) << pad("V_P", 14)
       << pad("D2+VP2-1", 11) << pad("D2+VC2-1", 11) << "flags\n";
    std::string last_file;
    for (const auto &row : report.rows) {
        if (row.file != last_file) {
            os << "# " << row.file << "\n";
            last_file = row.file;
        }
        std::string flags;
        for (const auto &f : row.flags) {
            flags += (flags.empty() ? "" : "; ") + f;
        }
        os << pad(row.experiment, 13) << pad(std::to_string(row.N), 4)
           << pad(fixed(row.theta / std::numbers::pi, 4), 10)
           << pad(cell(row.D, row.D_err), 14)
           << pad(cell(row.V_C, row.V_C_err), 14)
           << pad(cell(row.V_P, row.V_P_err), 14)
           << pad(sci(row.residual_equality), 11)
           << pad(sci(row.residual_inequality), 11) << flags << "\n";
    }
    os << report.rows.size() << " rows, " << report.flagged << " flagged\n";
    return os.str();
}

} // namespace wpd::cli
