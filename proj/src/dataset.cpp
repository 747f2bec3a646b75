#include "gmc/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gmc/error.hpp"
#include "gmc/numeric.hpp"

namespace gmc {

namespace {

constexpr double kCanonicalMax = 100.0;
constexpr double kMuFloor = 0.01;

void warn(const std::string& msg) { std::cerr << "gmc: warning: " << msg << "\n"; }

struct RawRow {
    std::string id;
    double pred = 0.0;
    double mos = 0.0;
    std::optional<double> sigma;
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& field, const std::string& column, std::size_t row) {
    const std::string t = trim(field);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(value)) {
        fail(Errc::NonNumericValue, "non-numeric value '" + field + "' in column '" + column +
                                        "' at data row " + std::to_string(row));
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::vector<RawRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::IoError, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) fail(Errc::MissingColumn, "'" + path + "' is empty");
    const auto header = split_csv_line(line);

    int col_id = -1, col_pred = -1, col_mos = -1, col_std = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == "id") col_id = static_cast<int>(c);
        else if (name == "pred") col_pred = static_cast<int>(c);
        else if (name == "mos") col_mos = static_cast<int>(c);
        else if (name == "std") col_std = static_cast<int>(c);
        else warn("'" + path + "': ignoring unknown column '" + name + "'");
    }
    for (const auto& [col, name] :
         {std::pair{col_id, "id"}, std::pair{col_pred, "pred"}, std::pair{col_mos, "mos"}}) {
        if (col < 0) fail(Errc::MissingColumn, "'" + path + "': missing column '" + std::string(name) + "'");
    }

    std::vector<RawRow> rows;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row_no;
        const auto fields = split_csv_line(line);
        if (fields.size() < header.size()) {
            fail(Errc::NonNumericValue,
                 "'" + path + "': data row " + std::to_string(row_no) + " has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(header.size()));
        }
        RawRow r;
        r.id = trim(fields[static_cast<std::size_t>(col_id)]);
        r.pred = parse_number(fields[static_cast<std::size_t>(col_pred)], "pred", row_no);
        r.mos = parse_number(fields[static_cast<std::size_t>(col_mos)], "mos", row_no);
        if (col_std >= 0) {
            const std::string f = trim(fields[static_cast<std::size_t>(col_std)]);
            if (!f.empty()) r.sigma = parse_number(f, "std", row_no);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<RawRow> read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::IoError, "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::NonNumericValue, "'" + path + "': invalid JSON: " + e.what());
    }
    if (!doc.is_array()) fail(Errc::MissingColumn, "'" + path + "': expected a JSON array of objects");

    std::set<std::string> warned;
    std::vector<RawRow> rows;
    std::size_t row_no = 0;
    for (const auto& obj : doc) {
        ++row_no;
        if (!obj.is_object())
            fail(Errc::NonNumericValue, "'" + path + "': entry " + std::to_string(row_no) + " is not an object");
        for (const auto& [key, unused] : obj.items()) {
            if (key != "id" && key != "pred" && key != "mos" && key != "std" &&
                warned.insert(key).second) {
                warn("'" + path + "': ignoring unknown key '" + key + "'");
            }
        }
        RawRow r;
        if (!obj.contains("pred")) fail(Errc::MissingColumn, "'" + path + "': missing key 'pred'");
        if (!obj.contains("mos")) fail(Errc::MissingColumn, "'" + path + "': missing key 'mos'");
        if (!obj.contains("id")) fail(Errc::MissingColumn, "'" + path + "': missing key 'id'");
        r.id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
        auto num = [&](const char* key) -> double {
            const auto& v = obj[key];
            if (!v.is_number())
                fail(Errc::NonNumericValue, "'" + path + "': non-numeric '" + key + "' at entry " +
                                                std::to_string(row_no));
            return v.get<double>();
        };
        r.pred = num("pred");
        r.mos = num("mos");
        if (obj.contains("std") && !obj["std"].is_null()) r.sigma = num("std");
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace

double estimate_sigma(double mos_normalized, double dispersion_phi) {
    const double mu = std::clamp(mos_normalized / kCanonicalMax, kMuFloor, 1.0 - kMuFloor);
    return kCanonicalMax * std::sqrt(mu * (1.0 - mu) / (1.0 + dispersion_phi));
}

Dataset::Dataset(std::vector<Sample> samples, std::pair<double, double> scale_bounds,
                 bool sigma_column_present)
    : samples_(std::move(samples)),
      scale_bounds_(scale_bounds),
      sigma_column_present_(sigma_column_present) {
    if (samples_.size() < 3)
        fail(Errc::FewerThanThreeSamples,
             "need at least 3 samples, got " + std::to_string(samples_.size()));
    preds_.reserve(samples_.size());
    mos_.reserve(samples_.size());
    for (const auto& s : samples_) {
        preds_.push_back(s.pred);
        mos_.push_back(s.mos);
        if (s.sigma && !(*s.sigma > 0.0 && std::isfinite(*s.sigma)))
            fail(Errc::NonNumericValue, "sample '" + s.id + "' has non-positive sigma");
    }
    pred_ranks_ = midranks(preds_);
    mos_ranks_ = midranks(mos_);
}

bool Dataset::all_sigmas_present() const {
    return std::all_of(samples_.begin(), samples_.end(),
                       [](const Sample& s) { return s.sigma.has_value(); });
}

double Dataset::mos_min() const { return *std::min_element(mos_.begin(), mos_.end()); }
double Dataset::mos_max() const { return *std::max_element(mos_.begin(), mos_.end()); }

Dataset Dataset::with_estimated_sigmas(double dispersion_phi) const {
    std::vector<Sample> out = samples_;
    for (auto& s : out) {
        if (!s.sigma) {
            s.sigma = estimate_sigma(s.mos, dispersion_phi);
            s.sigma_source = SigmaSource::BetaEstimated;
        }
    }
    return Dataset(std::move(out), scale_bounds_, sigma_column_present_);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Sample> out;
    out.reserve(indices.size());
    for (std::size_t idx : indices) out.push_back(samples_.at(idx));
    return Dataset(std::move(out), scale_bounds_, sigma_column_present_);
}

Dataset Dataset::with_preds(std::span<const double> new_preds) const {
    if (new_preds.size() != samples_.size())
        fail(Errc::LengthMismatch, "pred column length mismatch");
    std::vector<Sample> out = samples_;
    for (std::size_t i = 0; i < out.size(); ++i) out[i].pred = new_preds[i];
    return Dataset(std::move(out), scale_bounds_, sigma_column_present_);
}

std::vector<double> Dataset::sigmas_or_throw() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) {
        if (!s.sigma) fail(Errc::MissingSigma, "sample '" + s.id + "' has no sigma");
        out.push_back(*s.sigma);
    }
    return out;
}

ScoreFormat detect_format(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        std::string ext = path.substr(dot + 1);
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == "json") return ScoreFormat::Json;
    }
    return ScoreFormat::Csv;
}

Dataset load_scores(const std::string& path, ScoreFormat format,
                    std::optional<std::pair<double, double>> scale_override) {
    const auto rows = format == ScoreFormat::Csv ? read_csv(path) : read_json(path);
    if (rows.size() < 3)
        fail(Errc::FewerThanThreeSamples,
             "'" + path + "': need at least 3 samples, got " + std::to_string(rows.size()));

    double lo, hi;
    if (scale_override) {
        lo = scale_override->first;
        hi = scale_override->second;
    } else {
        lo = hi = rows.front().mos;
        for (const auto& r : rows) {
            lo = std::min(lo, r.mos);
            hi = std::max(hi, r.mos);
        }
    }
    if (!(hi > lo)) fail(Errc::DegenerateScale, "'" + path + "': MOS scale max must exceed min");
    const double factor = kCanonicalMax / (hi - lo);

    bool clamped = false;
    std::vector<Sample> samples;
    samples.reserve(rows.size());
    for (const auto& r : rows) {
        Sample s;
        s.id = r.id;
        s.pred = r.pred;
        // Division-first form keeps the scale endpoints exactly at 0 and 100.
        s.mos = (r.mos - lo) / (hi - lo) * kCanonicalMax;
        if (s.mos < 0.0 || s.mos > kCanonicalMax) {
            s.mos = std::clamp(s.mos, 0.0, kCanonicalMax);
            clamped = true;
        }
        if (r.sigma) {
            s.sigma = *r.sigma * factor;
            s.sigma_source = SigmaSource::Provided;
        }
        samples.push_back(std::move(s));
    }
    if (clamped) warn("'" + path + "': MOS values outside the given scale were clamped to [0,100]");

    const bool sigma_col = std::any_of(rows.begin(), rows.end(),
                                       [](const RawRow& r) { return r.sigma.has_value(); });
    return Dataset(std::move(samples), {lo, hi}, sigma_col);
}

} // namespace gmc
