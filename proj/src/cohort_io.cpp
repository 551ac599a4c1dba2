/*
 * Copyright 2026 The distforest Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "distforest/cohort_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/tokenizer.hpp>

#include "distforest/rng.hpp"

namespace distforest {

namespace {

using CsvTokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  CsvTokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
  for (const auto& cell : tok) cells.push_back(trim(cell));
  return cells;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA" || s == "na" || s == "N/A"; }

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\\") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? header.size() : static_cast<std::size_t>(it - header.begin());
}

}  // namespace

PatientTable read_patients(std::istream& in, const CohortSchema& schema, bool require_response) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("cohort file is empty");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_csv(line);

  auto require = [&](const std::string& name) {
    const std::size_t idx = column_index(header, name);
    if (idx == header.size()) throw std::runtime_error("missing required column: " + name);
    return idx;
  };
  const std::size_t id_col = require(schema.id);
  std::array<std::size_t, kNumFeatures> feature_cols{};
  for (std::size_t f = 0; f < kNumFeatures; ++f) feature_cols[f] = require(schema.features[f]);
  std::optional<std::size_t> odx_col;
  if (require_response) {
    odx_col = require(schema.odx_score);
  } else if (std::size_t idx = column_index(header, schema.odx_score); idx != header.size()) {
    odx_col = idx;
  }

  PatientTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++table.rows_read;

    auto reject = [&](std::string column, std::string reason) {
      table.rejected.push_back({line_no, std::move(column), std::move(reason)});
    };

    std::vector<std::string> cells;
    try {
      cells = split_csv(line);
    } catch (const boost::escaped_list_error& e) {
      reject("", std::string("malformed CSV: ") + e.what());
      continue;
    }
    if (cells.size() != header.size()) {
      reject("", "expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(cells.size()));
      continue;
    }

    PatientRecord rec;
    rec.id = cells[id_col];
    if (rec.id.empty()) {
      reject(schema.id, "id is empty");
      continue;
    }

    bool ok = true;
    for (std::size_t f = 0; f < kNumFeatures && ok; ++f) {
      const std::string& cell = cells[feature_cols[f]];
      const std::string& col = schema.features[f];
      if (static_cast<Feature>(f) == Feature::lymph_nodes && is_missing(cell)) {
        rec.features[f] = kLymphNodesUnknown;
        continue;
      }
      if (cell.empty()) {
        reject(col, col + " is empty");
        ok = false;
      } else if (auto v = parse_number(cell)) {
        rec.features[f] = *v;
      } else {
        reject(col, col + " is not numeric: '" + cell + "'");
        ok = false;
      }
    }
    if (!ok) continue;

    if (auto err = validate_features(rec.features)) {
      reject(schema.features[index_of(err->feature)], err->message);
      continue;
    }
    if (rec.features[Feature::er] < kMinEstrogenReceptorPct) {
      reject(schema.features[index_of(Feature::er)], "er below 10% (cohort is ER-positive)");
      continue;
    }

    if (odx_col) {
      const std::string& cell = cells[*odx_col];
      if (cell.empty() || cell == "NA") {
        if (require_response) {
          reject(schema.odx_score, "odx_score missing");
          continue;
        }
      } else if (auto v = parse_number(cell)) {
        if (!(*v >= 0.0 && *v <= 100.0)) {
          reject(schema.odx_score, "odx_score out of range [0,100]");
          continue;
        }
        rec.odx_score = *v;
      } else {
        reject(schema.odx_score, "odx_score is not numeric: '" + cell + "'");
        continue;
      }
    }
    table.records.push_back(std::move(rec));
  }
  return table;
}

PatientTable read_patients(const std::filesystem::path& path, const CohortSchema& schema,
                           bool require_response) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_patients(in, schema, require_response);
}

namespace {

CohortLoad to_cohort(PatientTable table) {
  if (table.records.empty()) throw std::runtime_error("no valid rows in cohort");
  std::vector<FeatureVector> x;
  std::vector<double> y;
  std::vector<std::string> ids;
  for (auto& r : table.records) {
    x.push_back(r.features);
    y.push_back(*r.odx_score);
    ids.push_back(std::move(r.id));
  }
  return {Dataset(std::move(x), std::move(y), std::move(ids)), std::move(table.rejected),
          table.rows_read};
}

}  // namespace

CohortLoad load_cohort(const std::filesystem::path& path, const CohortSchema& schema) {
  return to_cohort(read_patients(path, schema, true));
}

CohortLoad load_cohort(std::istream& in, const CohortSchema& schema) {
  return to_cohort(read_patients(in, schema, true));
}

void write_cohort(const Dataset& data, std::ostream& out) {
  const CohortSchema schema;
  out << schema.id;
  for (const auto& name : schema.features) out << ',' << name;
  out << ',' << schema.odx_score << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << quote_if_needed(data.id(i));
    const FeatureVector& x = data.features(i);
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      out << ',';
      if (static_cast<Feature>(f) == Feature::lymph_nodes && x[f] == kLymphNodesUnknown) {
        out << "NA";
      } else {
        out << format_number(x[f]);
      }
    }
    out << ',' << format_number(data.response(i)) << '\n';
  }
}

void write_cohort(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_cohort(data, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::size_t MarginalTable::band_of(double value) const {
  for (std::size_t b = 0; b < bands.size(); ++b) {
    if (bands[b].discrete() && bands[b].lo == value) return b;
  }
  std::size_t last_continuous = bands.size();
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const Band& band = bands[b];
    if (band.discrete()) continue;
    last_continuous = b;
    if (value < band.hi || (band.hi_inclusive && value == band.hi)) return b;
  }
  return last_continuous;
}

CohortMarginals CohortMarginals::reference() {
  CohortMarginals m;
  m.tables = {
      {"Age", Feature::age, {{"<=50 yr", 28.0, 50.0, true, 30.63}, {">50 yr", 50.0, 85.0, true, 69.37}}},
      {"Tumor size",
       Feature::tumor_size,
       {{"< 1 cm", 0.2, 1.0, false, 11.41},
        {"1-2 cm", 1.0, 2.0, true, 53.76},
        {"> 2 cm", 2.0, 6.0, true, 34.83}}},
      {"p53", Feature::p53, {{"<= 10 %", 0.0, 10.0, true, 53.75}, {"> 10 %", 10.0, 60.0, true, 46.25}}},
      {"SBR grade",
       Feature::sbr_grade,
       {{"1", 1.0, 1.0, true, 8.71}, {"2", 2.0, 2.0, true, 55.86}, {"3", 3.0, 3.0, true, 35.43}}},
      {"Mitotic grade",
       Feature::mitotic_grade,
       {{"1", 1.0, 1.0, true, 31.53}, {"2", 2.0, 2.0, true, 49.25}, {"3", 3.0, 3.0, true, 19.22}}},
      {"ER status",
       Feature::er,
       {{"Negative", 0.0, 10.0, false, 0.0}, {"Positive (>=10%)", 10.0, 100.0, true, 100.0}}},
      {"PR status",
       Feature::pr,
       {{"Negative", 0.0, 10.0, false, 17.72}, {"Positive (>=10%)", 10.0, 100.0, true, 82.28}}},
      {"Ki67-positive cells",
       Feature::ki67,
       {{"< 10 %", 0.0, 10.0, false, 0.30},
        {"10-20 %", 10.0, 20.0, true, 36.94},
        {"> 20 %", 20.0, 60.0, true, 62.76}}},
      {"Lymph node status",
       Feature::lymph_nodes,
       {{"0", 0.0, 0.0, true, 45.35},
        {"1", 1.0, 1.0, true, 29.13},
        {"2", 2.0, 2.0, true, 7.81},
        {"3", 3.0, 3.0, true, 6.00},
        {"NA", kLymphNodesUnknown, kLymphNodesUnknown, true, 11.71}}},
  };
  m.odx_bands = {33.93, 41.44, 24.63};
  return m;
}

Dataset synth_cohort(const CohortMarginals& marginals, std::size_t n, std::uint64_t seed,
                     const LinkModel& link) {
  if (n == 0) throw std::invalid_argument("synthetic cohort needs n >= 1");
  Rng rng(seed);

  // Defaults fill any slot the marginals leave out.
  FeatureVector base;
  base[Feature::age] = 60.0;
  base[Feature::tumor_size] = 1.5;
  base[Feature::sbr_grade] = 2.0;
  base[Feature::mitotic_grade] = 2.0;
  base[Feature::er] = 90.0;
  base[Feature::pr] = 50.0;
  base[Feature::ki67] = 20.0;

  std::vector<std::discrete_distribution<std::size_t>> pickers;
  for (const auto& table : marginals.tables) {
    std::vector<double> w;
    for (const auto& band : table.bands) w.push_back(band.percent);
    pickers.emplace_back(w.begin(), w.end());
  }
  std::normal_distribution<double> noise(0.0, link.noise_sd);

  std::vector<FeatureVector> x(n, base);
  std::vector<double> y(n);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < marginals.tables.size(); ++t) {
      const Band& band = marginals.tables[t].bands[pickers[t](rng)];
      double v = band.lo;
      if (!band.discrete()) v = std::uniform_real_distribution<double>(band.lo, band.hi)(rng);
      x[i][marginals.tables[t].feature] = v;
    }
    const FeatureVector& p = x[i];
    const double latent = link.intercept + link.ki67 * p[Feature::ki67] +
                          link.sbr * (p[Feature::sbr_grade] - 1.0) +
                          link.mitotic * (p[Feature::mitotic_grade] - 1.0) +
                          link.p53 * p[Feature::p53] - link.pr * p[Feature::pr] + noise(rng);
    y[i] = std::clamp(latent, kScoreMin, kScoreMax);
    char buf[32];
    std::snprintf(buf, sizeof buf, "SYN%05zu", i + 1);
    ids[i] = buf;
  }
  return Dataset(std::move(x), std::move(y), std::move(ids));
}

std::string cohort_report(const Dataset& data, const CohortMarginals& marginals) {
  auto odx_band = [](double y) { return y < 16.0 ? 0 : (y <= 25.0 ? 1 : 2); };
  std::array<std::size_t, 3> population{};
  for (double y : data.responses()) ++population[static_cast<std::size_t>(odx_band(y))];
  const double pct = 100.0 / static_cast<double>(data.size());

  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %-18s %8s %8s %8s %8s\n", "", "", "< 16", "16-25", "> 25",
                "Total");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-22s %-18s %8zu %8zu %8zu %8zu\n", "Population", "",
                population[0], population[1], population[2], data.size());
  out << buf;
  for (const auto& table : marginals.tables) {
    std::vector<std::array<std::size_t, 3>> counts(table.bands.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t b = table.band_of(data.features(i)[table.feature]);
      if (b < counts.size()) ++counts[b][static_cast<std::size_t>(odx_band(data.response(i)))];
    }
    for (std::size_t b = 0; b < table.bands.size(); ++b) {
      const auto& c = counts[b];
      std::snprintf(buf, sizeof buf, "%-22s %-18s %8.2f %8.2f %8.2f %8.2f\n",
                    b == 0 ? table.name.c_str() : "", table.bands[b].label.c_str(),
                    static_cast<double>(c[0]) * pct, static_cast<double>(c[1]) * pct,
                    static_cast<double>(c[2]) * pct, static_cast<double>(c[0] + c[1] + c[2]) * pct);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace distforest
