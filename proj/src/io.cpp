#include "farx/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "farx/error.hpp"

namespace farx::io {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void require_schema(const json& doc, const std::string& what) {
  if (!doc.is_object() || !doc.contains("schema_version"))
    throw ConfigError(what + ": missing schema_version");
  const auto& v = doc.at("schema_version");
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
    throw ConfigError(what + ": unsupported schema_version " + v.dump() + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".meta.json");
  return p;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma - start);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError(source + ":" + std::to_string(lineno) + ": cannot parse '" + cell + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(source + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_sample(const std::filesystem::path& csv, const Sample& sample, json extra) {
  std::ofstream out(csv);
  if (!out) throw ConfigError("cannot write " + csv.string());
  write_matrix_csv(out, sample.curves());
  if (!out) throw ConfigError("failed writing " + csv.string());

  json meta = json::object();
  meta["schema_version"] = kSchemaVersion;
  meta["kind"] = "functional_sample";
  meta["curves"] = sample.length();
  meta["grid_points"] = std::vector<double>(sample.grid().points().data(),
                                            sample.grid().points().data() + sample.grid().size());
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  write_json(sidecar_path(csv), meta);
}

Sample read_sample(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw DataError("cannot open " + csv.string());
  Eigen::MatrixXd curves = read_matrix_csv(in, csv.string());
  const auto meta_path = sidecar_path(csv);
  if (std::filesystem::exists(meta_path)) {
    const json meta = read_json(meta_path);
    require_schema(meta, meta_path.string());
    const auto pts = meta.at("grid_points").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(pts.size()) != curves.cols())
      throw DimensionError(meta_path.string() + ": grid size does not match CSV columns");
    const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
    return Sample(Grid::trapezoid(p), std::move(curves));
  }
  Grid grid = Grid::uniform(curves.cols());
  return Sample(std::move(grid), std::move(curves));
}

json regime_to_json(const RegimeSpec& s) {
  return json{{"id", s.id},
              {"basis_dim", s.basis_dim},
              {"block_size", s.block_size},
              {"within_block_decay", s.within_block_decay},
              {"decay_axis", to_string(s.decay_axis)},
              {"innovation_decay", s.innovation_decay},
              {"innovation_total_variance", s.innovation_total_variance},
              {"spectral_radius_target", s.spectral_radius_target},
              {"rescale", to_string(s.rescale)},
              {"grid_points", s.grid_points},
              {"burn_in", s.burn_in}};
}

RegimeSpec regime_from_json(const json& doc) {
  if (doc.is_string()) return RegimeSpec::named(doc.get<std::string>());
  if (!doc.is_object()) throw ConfigError("regime entry must be a name or an object");
  RegimeSpec s = RegimeSpec::named(doc.value("base", std::string("I")));
  try {
    s.id = doc.value("id", s.id);
    s.basis_dim = doc.value("basis_dim", s.basis_dim);
    s.block_size = doc.value("block_size", s.block_size);
    s.within_block_decay = doc.value("within_block_decay", s.within_block_decay);
    if (doc.contains("decay_axis")) s.decay_axis = decay_axis_from_string(doc.at("decay_axis").get<std::string>());
    s.innovation_decay = doc.value("innovation_decay", s.innovation_decay);
    s.innovation_total_variance = doc.value("innovation_total_variance", s.innovation_total_variance);
    s.spectral_radius_target = doc.value("spectral_radius_target", s.spectral_radius_target);
    if (doc.contains("rescale")) s.rescale = rescale_norm_from_string(doc.at("rescale").get<std::string>());
    s.grid_points = doc.value("grid_points", s.grid_points);
    s.burn_in = doc.value("burn_in", s.burn_in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("regime: ") + e.what());
  }
  s.validate();
  return s;
}

json cv_to_json(const CvResult& cv) {
  json curve = json::array();
  for (const auto& p : cv.curve) curve.push_back(json{{"alpha", p.alpha}, {"loss", p.loss}});
  json folds = json::array();
  for (const auto& f : cv.folds)
    folds.push_back(json{{"train_end", f.train_end}, {"target_begin", f.target_begin}, {"target_end", f.target_end}});
  return json{{"selected_alpha", cv.selected_alpha}, {"curve", curve}, {"folds", folds}};
}

BenchmarkConfig benchmark_config_from_json(const json& doc) {
  require_schema(doc, "benchmark config");
  BenchmarkConfig c = BenchmarkConfig::standard();
  try {
    if (doc.contains("master_seed")) c.master_seed = doc.at("master_seed").get<std::uint64_t>();
    c.replications = doc.value("replications", c.replications);
    c.test_length = doc.value("test_length", c.test_length);
    c.threads = doc.value("threads", c.threads);
    if (doc.contains("sample_sizes")) c.sample_sizes = doc.at("sample_sizes").get<std::vector<int>>();
    if (doc.contains("methods")) {
      c.methods.clear();
      for (const auto& m : doc.at("methods")) c.methods.push_back(MethodSpec::parse(m.get<std::string>()));
    }
    if (doc.contains("regimes")) {
      c.regimes.clear();
      for (const auto& r : doc.at("regimes")) c.regimes.push_back(regime_from_json(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("benchmark config: ") + e.what());
  }
  c.validate();
  return c;
}

json benchmark_config_to_json(const BenchmarkConfig& c) {
  json regimes = json::array();
  for (const auto& r : c.regimes) regimes.push_back(regime_to_json(r));
  json methods = json::array();
  for (const auto& m : c.methods) methods.push_back(m.to_string());
  return json{{"schema_version", kSchemaVersion}, {"master_seed", c.master_seed}, {"replications", c.replications},
              {"test_length", c.test_length},     {"threads", c.threads},         {"sample_sizes", c.sample_sizes},
              {"methods", methods},               {"regimes", regimes}};
}

void write_records_csv(std::ostream& out, const std::vector<CellResult>& records) {
  out << "regime,n,method,replication,status,misfe,tuning,hs_error\n";
  for (const auto& r : records) {
    out << r.regime << ',' << r.n << ',' << r.method << ',' << r.replication << ',' << (r.ok ? "ok" : "failed") << ',';
    if (r.ok) out << format_double(r.misfe) << ',' << format_double(r.tuning) << ',' << format_double(r.estimation_error);
    else out << ",,";
    out << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<CellResult>& records) {
  out << "regime,n,method,replication,seconds\n";
  for (const auto& r : records)
    out << r.regime << ',' << r.n << ',' << r.method << ',' << r.replication << ',' << format_double(r.seconds) << '\n';
}

void write_rolling_header(std::ostream& out) { out << "date,method,ise,alpha_or_k,refit_flag\n"; }

void write_rolling_rows(std::ostream& out, const RollingResult& result) {
  for (const auto& r : result.records) {
    out << (r.date ? format_iso_date(*r.date) : std::to_string(r.index)) << ',' << result.method << ',';
    if (r.ok) out << format_double(r.ise) << ',' << format_double(r.tuning);
    else out << ',';
    out << ',' << (r.refit ? 1 : 0) << '\n';
  }
}

void write_weekday_table(std::ostream& out, const Eigen::MatrixXd& means) {
  static const char* names[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
  out << "weekday";
  for (int s = 1; s <= kSlotsPerDay; ++s) {
    char buf[8];
    std::snprintf(buf, sizeof buf, ",h%02d", s);
    out << buf;
  }
  out << '\n';
  for (Eigen::Index w = 0; w < means.rows(); ++w) {
    out << names[w];
    for (Eigen::Index s = 0; s < means.cols(); ++s) out << ',' << format_double(means(w, s));
    out << '\n';
  }
}

}  // namespace farx::io
