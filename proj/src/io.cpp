#include "dynlsm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

namespace dynlsm::io {

using Json = nlohmann::ordered_json;

std::string format_double(double x) {
  if (!std::isfinite(x)) throw NumericError("non-finite value in output");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << contents;
  if (!out) throw DataError(path + ": write failed");
}

namespace {

// ---- text helpers ----

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string at_line(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string v = trim(s);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw DataError(what + ": not a number '" + v + "'");
  if (!std::isfinite(x)) throw DataError(what + ": non-finite value");
  return x;
}

template <typename Int>
Int parse_int(const std::string& s, const std::string& what) {
  const std::string v = trim(s);
  Int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw DataError(what + ": not an integer '" + v + "'");
  return x;
}

// Reads the next line, dropping a trailing CR. Returns false at EOF.
bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
  if (!std::getline(in, line)) return false;
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::map<std::string, std::string> parse_comment_fields(
    const std::string& body) {
  std::map<std::string, std::string> fields;
  for (const auto& part : split(body, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) continue;
    fields[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
  }
  return fields;
}

// ---- canonical JSON ----

bool scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void dump(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * depth + 2, ' ');
  const std::string close_pad(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) flat = flat && scalar(e);
      if (flat) {
        out += '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          dump(j[k], out, depth + 1);
        }
        out += ']';
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        out += pad;
        dump(j[k], out, depth + 1);
        out += k + 1 < j.size() ? ",\n" : "\n";
      }
      out += close_pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t k = 0;
      for (const auto& [key, value] : j.items()) {
        out += pad + Json(key).dump() + ": ";
        dump(value, out, depth + 1);
        out += ++k < j.size() ? ",\n" : "\n";
      }
      out += close_pad + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string canonical(const Json& j) {
  std::string out;
  dump(j, out, 0);
  out += '\n';
  return out;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(what + ": malformed or truncated JSON (" +
                    std::string(e.what()) + ")");
  }
}

const Json& field(const Json& obj, const std::string& key,
                  const std::string& path) {
  if (!obj.is_object()) throw DataError(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end())
    throw DataError("missing field '" + path + "." + key + "'");
  return *it;
}

double num(const Json& j, const std::string& path) {
  if (!j.is_number()) throw DataError(path + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw DataError(path + ": non-finite value");
  return x;
}

double num(const Json& obj, const std::string& key, const std::string& path) {
  return num(field(obj, key, path), path + "." + key);
}

template <typename Int>
Int integer(const Json& obj, const std::string& key, const std::string& path) {
  const Json& j = field(obj, key, path);
  if (!j.is_number_integer())
    throw DataError(path + "." + key + ": expected an integer");
  return j.get<Int>();
}

std::string str(const Json& obj, const std::string& key,
                const std::string& path) {
  const Json& j = field(obj, key, path);
  if (!j.is_string()) throw DataError(path + "." + key + ": expected a string");
  return j.get<std::string>();
}

Json row_major(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) a.push_back(m(r, c));
  return a;
}

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Eigen::MatrixXd matrix_from(const Json& a, Index rows, Index cols,
                            const std::string& path) {
  if (!a.is_array() || static_cast<Index>(a.size()) != rows * cols)
    throw DataError(path + ": expected " + std::to_string(rows * cols) +
                    " numbers");
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c)
      m(r, c) = num(a[r * cols + c], path);
  return m;
}

const Json& array_of(const Json& obj, const std::string& key,
                     const std::string& path, std::size_t size) {
  const Json& a = field(obj, key, path);
  if (!a.is_array() || a.size() != size)
    throw DataError(path + "." + key + ": expected an array of " +
                    std::to_string(size));
  return a;
}

// ---- config ----

Json hyper_json(const std::string& mode, const ScaleHyper& h) {
  return Json{{"mode", mode},
              {"a_sigma0", h.a_sigma0},
              {"b_sigma0", h.b_sigma0},
              {"c_tau", h.c_tau},
              {"d_tau", h.d_tau}};
}

Json config_json(const ModelConfig& cfg) {
  Json scales;
  if (const auto* f = std::get_if<FixedScales>(&cfg.scales))
    scales = Json{{"mode", "fixed"}, {"sigma0", f->sigma0}, {"tau", f->tau}};
  else if (const auto* g = std::get_if<AdaptiveGlobal>(&cfg.scales))
    scales = hyper_json("adaptive_global", g->hyper);
  else
    scales = hyper_json("adaptive_nodewise",
                        std::get<AdaptiveNodewise>(cfg.scales).hyper);
  Json j;
  j["d"] = cfg.d;
  j["alpha"] = cfg.alpha;
  j["family"] = to_string(cfg.family);
  j["scales"] = scales;
  j["beta_prior_mean"] = cfg.beta_prior_mean;
  j["beta_prior_var"] = cfg.beta_prior_var;
  j["max_iters"] = cfg.max_iters;
  j["stop_tol"] = cfg.stop_tol ? Json(*cfg.stop_tol) : Json(nullptr);
  j["auc_floor"] = cfg.auc_floor;
  j["seed"] = cfg.seed;
  j["jacobi"] = cfg.jacobi;
  return j;
}

void check_keys(const Json& obj, std::initializer_list<const char*> known,
                const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError(path + "." + key + ": unknown field");
  }
}

ScaleHyper hyper_from(const Json& s, const std::string& path) {
  ScaleHyper h;
  if (s.contains("a_sigma0")) h.a_sigma0 = num(s, "a_sigma0", path);
  if (s.contains("b_sigma0")) h.b_sigma0 = num(s, "b_sigma0", path);
  if (s.contains("c_tau")) h.c_tau = num(s, "c_tau", path);
  if (s.contains("d_tau")) h.d_tau = num(s, "d_tau", path);
  return h;
}

// Missing fields keep their defaults; unknown fields are rejected.
ModelConfig config_from(const Json& j, const std::string& path) {
  if (!j.is_object()) throw DataError(path + ": expected an object");
  check_keys(j,
             {"d", "alpha", "family", "scales", "beta_prior_mean",
              "beta_prior_var", "max_iters", "stop_tol", "auc_floor", "seed",
              "jacobi"},
             path);
  ModelConfig cfg;
  if (j.contains("d")) cfg.d = integer<Index>(j, "d", path);
  if (j.contains("alpha")) cfg.alpha = num(j, "alpha", path);
  if (j.contains("family")) cfg.family = parse_family(str(j, "family", path));
  if (j.contains("scales")) {
    const Json& s = j["scales"];
    const std::string sp = path + ".scales";
    const std::string mode = str(s, "mode", sp);
    if (mode == "fixed") {
      check_keys(s, {"mode", "sigma0", "tau"}, sp);
      FixedScales f;
      if (s.contains("sigma0")) f.sigma0 = num(s, "sigma0", sp);
      if (s.contains("tau")) f.tau = num(s, "tau", sp);
      cfg.scales = f;
    } else if (mode == "adaptive_global" || mode == "adaptive_nodewise") {
      check_keys(s, {"mode", "a_sigma0", "b_sigma0", "c_tau", "d_tau"}, sp);
      const ScaleHyper h = hyper_from(s, sp);
      if (mode == "adaptive_global")
        cfg.scales = AdaptiveGlobal{h};
      else
        cfg.scales = AdaptiveNodewise{h};
    } else {
      throw ConfigError(sp + ".mode: expected fixed, adaptive_global or "
                        "adaptive_nodewise, got '" + mode + "'");
    }
  }
  if (j.contains("beta_prior_mean"))
    cfg.beta_prior_mean = num(j, "beta_prior_mean", path);
  if (j.contains("beta_prior_var"))
    cfg.beta_prior_var = num(j, "beta_prior_var", path);
  if (j.contains("max_iters")) cfg.max_iters = integer<int>(j, "max_iters", path);
  if (j.contains("stop_tol") && !j["stop_tol"].is_null())
    cfg.stop_tol = num(j, "stop_tol", path);
  if (j.contains("auc_floor")) cfg.auc_floor = num(j, "auc_floor", path);
  if (j.contains("seed")) cfg.seed = integer<std::uint64_t>(j, "seed", path);
  if (j.contains("jacobi")) {
    if (!j["jacobi"].is_boolean())
      throw DataError(path + ".jacobi: expected a boolean");
    cfg.jacobi = j["jacobi"].get<bool>();
  }
  validate_config(cfg);
  return cfg;
}

Json data_json(const DataInfo& d) {
  return Json{{"kind", to_string(d.kind)},
              {"n", d.n},
              {"T", d.T},
              {"noise_sd", d.noise_sd},
              {"seed", d.seed}};
}

Json trace_json(const std::vector<TraceRecord>& trace) {
  Json a = Json::array();
  for (const auto& r : trace)
    a.push_back(Json{{"sweep", r.sweep},
                     {"statistic", r.statistic},
                     {"elbo", r.elbo ? Json(*r.elbo) : Json(nullptr)}});
  return a;
}

}  // namespace

// ---- series ----

SeriesFile read_series(std::istream& in, const SeriesReadOptions& opts) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_line(in, line, lineno) || line.rfind('#', 0) != 0)
    throw DataError(at_line(1) +
                    "expected header comment '# n=..,T=..,kind=..'");
  const auto fields = parse_comment_fields(line.substr(1));
  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end())
      throw DataError(at_line(1) + "header is missing '" + key + "'");
    return it->second;
  };
  const Index n = parse_int<Index>(need("n"), "n");
  const Index T = parse_int<Index>(need("T"), "T");
  if (n < 2) throw DataError(at_line(1) + "n: must be >= 2");
  if (T < 1) throw DataError(at_line(1) + "T: must be >= 1");
  SeriesFile file;
  RawSeries raw;
  raw.kind = parse_kind(need("kind"));
  if (fields.count("noise_sd"))
    raw.noise_sd = parse_double(fields.at("noise_sd"), "noise_sd");
  if (fields.count("seed"))
    file.seed = parse_int<std::uint64_t>(fields.at("seed"), "seed");
  if (opts.dense_zeros && raw.kind != LikelihoodKind::bernoulli)
    throw DataError("dense_zeros: applies to bernoulli series only");

  if (!next_line(in, line, lineno) || trim(line) != "t,i,j,value")
    throw DataError(at_line(lineno) + "expected column header 't,i,j,value'");

  raw.values.assign(T, Eigen::MatrixXd::Zero(n, n));
  raw.mask.assign(T, BoolMatrix::Constant(n, n, opts.dense_zeros));
  std::map<std::tuple<Index, Index, Index>, std::size_t> seen;
  while (next_line(in, line, lineno)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    const std::string where = at_line(lineno);
    if (cols.size() != 4)
      throw DataError(where + "expected 4 columns, got " +
                      std::to_string(cols.size()));
    const Index t = parse_int<Index>(cols[0], where + "t");
    Index i = parse_int<Index>(cols[1], where + "i");
    Index j = parse_int<Index>(cols[2], where + "j");
    const double v = parse_double(cols[3], where + "value");
    if (t < 1 || t > T)
      throw DataError(where + "t: " + std::to_string(t) + " outside 1.." +
                      std::to_string(T));
    if (i < 1 || i > n || j < 1 || j > n)
      throw DataError(where + "i/j: outside 1.." + std::to_string(n));
    if (i == j) throw DataError(where + "i/j: self-loop");
    if (i > j) std::swap(i, j);
    const auto key = std::make_tuple(t, i, j);
    if (const auto it = seen.find(key); it != seen.end())
      throw DataError(where + "duplicate entry (" + std::to_string(t) + "," +
                      std::to_string(i) + "," + std::to_string(j) +
                      "), first on line " + std::to_string(it->second));
    seen.emplace(key, lineno);
    raw.values[t - 1](i - 1, j - 1) = raw.values[t - 1](j - 1, i - 1) = v;
    raw.mask[t - 1](i - 1, j - 1) = raw.mask[t - 1](j - 1, i - 1) = true;
  }
  file.series = validate_series(raw);
  return file;
}

void write_series(std::ostream& out, const SeriesFile& file) {
  const NetworkSeries& s = file.series;
  out << "# n=" << s.n << ",T=" << s.T << ",kind=" << to_string(s.kind)
      << ",noise_sd=" << format_double(s.noise_sd) << ",seed=" << file.seed
      << "\n";
  out << "t,i,j,value\n";
  for (Index t = 0; t < s.T; ++t)
    for (Index i = 0; i < s.n; ++i)
      for (Index j = i + 1; j < s.n; ++j)
        if (s.observed(t, i, j))
          out << t + 1 << ',' << i + 1 << ',' << j + 1 << ','
              << format_double(s.values[t](i, j)) << '\n';
}

SeriesFile load_series(const std::string& path, const SeriesReadOptions& opts) {
  std::istringstream in(read_file(path));
  try {
    return read_series(in, opts);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_series(const std::string& path, const SeriesFile& file) {
  std::ostringstream out;
  write_series(out, file);
  write_file(path, out.str());
}

// ---- edge tables ----

EdgeTable read_edge_table(std::istream& in, bool require_values) {
  EdgeTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have = next_line(in, line, lineno);
  if (have && line.rfind('#', 0) == 0) {
    table.comment = trim(line.substr(1));
    have = next_line(in, line, lineno);
  }
  if (!have)
    throw DataError("header: missing column header 't,i,j,<value>'");
  const auto head = split(trim(line), ',');
  if (head.size() < 3 || head[0] != "t" || head[1] != "i" || head[2] != "j" ||
      head.size() > 4)
    throw DataError(at_line(lineno) +
                    "header: expected 't,i,j' or 't,i,j,<value>'");
  const bool has_values = head.size() == 4;
  if (require_values && !has_values)
    throw DataError(at_line(lineno) + "header: missing value column");
  if (has_values) table.column = head[3];
  while (next_line(in, line, lineno)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    const std::string where = at_line(lineno);
    if (cols.size() != head.size())
      throw DataError(where + "expected " + std::to_string(head.size()) +
                      " columns");
    const Index t = parse_int<Index>(cols[0], where + "t");
    Index i = parse_int<Index>(cols[1], where + "i");
    Index j = parse_int<Index>(cols[2], where + "j");
    if (t < 1 || i < 1 || j < 1)
      throw DataError(where + "t/i/j: indices are 1-based");
    if (i == j) throw DataError(where + "i/j: self-loop");
    if (i > j) std::swap(i, j);
    table.edges.push_back({t - 1, i - 1, j - 1});
    table.values.push_back(
        has_values ? parse_double(cols[3], where + table.column) : 0.0);
  }
  return table;
}

void write_edge_table(std::ostream& out, const EdgeTable& table) {
  if (!table.comment.empty()) out << "# " << table.comment << '\n';
  out << "t,i,j," << table.column << '\n';
  for (std::size_t k = 0; k < table.edges.size(); ++k) {
    const auto& e = table.edges[k];
    out << e.t + 1 << ',' << e.i + 1 << ',' << e.j + 1 << ','
        << format_double(table.values[k]) << '\n';
  }
}

EdgeTable load_edge_table(const std::string& path, bool require_values) {
  std::istringstream in(read_file(path));
  try {
    return read_edge_table(in, require_values);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_edge_table(const std::string& path, const EdgeTable& table) {
  std::ostringstream out;
  write_edge_table(out, table);
  write_file(path, out.str());
}

// ---- trajectories ----

TrajectoryFile read_trajectory(std::istream& in) {
  TrajectoryFile file;
  std::string line;
  std::size_t lineno = 0;
  bool have = next_line(in, line, lineno);
  if (have && line.rfind('#', 0) == 0) {
    file.comment = trim(line.substr(1));
    have = next_line(in, line, lineno);
  }
  if (!have) throw DataError("header: missing column header 't,i,x1,...'");
  const auto head = split(trim(line), ',');
  if (head.size() < 3 || head[0] != "t" || head[1] != "i")
    throw DataError(at_line(lineno) + "header: expected 't,i,x1,...'");
  const Index d = static_cast<Index>(head.size()) - 2;

  std::vector<std::tuple<Index, Index, Eigen::VectorXd>> rows;
  Index n = 0, T = 0;
  while (next_line(in, line, lineno)) {
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    const std::string where = at_line(lineno);
    if (static_cast<Index>(cols.size()) != d + 2)
      throw DataError(where + "expected " + std::to_string(d + 2) +
                      " columns");
    const Index t = parse_int<Index>(cols[0], where + "t");
    const Index i = parse_int<Index>(cols[1], where + "i");
    if (t < 1 || i < 1) throw DataError(where + "t/i: indices are 1-based");
    Eigen::VectorXd x(d);
    for (Index k = 0; k < d; ++k)
      x(k) = parse_double(cols[k + 2], where + head[k + 2]);
    n = std::max(n, i);
    T = std::max(T, t);
    rows.emplace_back(t - 1, i - 1, std::move(x));
  }
  if (rows.empty()) throw DataError("trajectory: no rows");
  file.positions.assign(T, Eigen::MatrixXd::Constant(n, d, std::nan("")));
  std::vector<bool> filled(n * T, false);
  for (auto& [t, i, x] : rows) {
    if (filled[t * n + i])
      throw DataError("trajectory: duplicate row for t=" +
                      std::to_string(t + 1) + ", i=" + std::to_string(i + 1));
    filled[t * n + i] = true;
    file.positions[t].row(i) = x.transpose();
  }
  for (Index t = 0; t < T; ++t)
    for (Index i = 0; i < n; ++i)
      if (!filled[t * n + i])
        throw DataError("trajectory: missing row for t=" +
                        std::to_string(t + 1) + ", i=" +
                        std::to_string(i + 1));
  return file;
}

void write_trajectory(std::ostream& out, const TrajectoryFile& file) {
  if (!file.comment.empty()) out << "# " << file.comment << '\n';
  const Index d = file.positions.empty() ? 0 : file.positions[0].cols();
  out << "t,i";
  for (Index k = 0; k < d; ++k) out << ",x" << k + 1;
  out << '\n';
  for (std::size_t t = 0; t < file.positions.size(); ++t) {
    const auto& X = file.positions[t];
    for (Index i = 0; i < X.rows(); ++i) {
      out << t + 1 << ',' << i + 1;
      for (Index k = 0; k < d; ++k) out << ',' << format_double(X(i, k));
      out << '\n';
    }
  }
}

TrajectoryFile load_trajectory(const std::string& path) {
  std::istringstream in(read_file(path));
  try {
    return read_trajectory(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_trajectory(const std::string& path, const TrajectoryFile& file) {
  std::ostringstream out;
  write_trajectory(out, file);
  write_file(path, out.str());
}

// ---- archive ----

std::string archive_to_json(const FitArchive& archive, bool include_xi) {
  const VariationalState& s = archive.result.state;
  Json state;
  state["n"] = s.n;
  state["T"] = s.T;
  state["d"] = s.d;
  state["beta_mean"] = s.beta_mean;
  state["beta_var"] = s.beta_var;
  Json mean = Json::array(), cov = Json::array(), cross = Json::array();
  for (const auto& m : s.mean) mean.push_back(vec(m));
  for (const auto& c : s.cov) cov.push_back(row_major(c));
  for (const auto& c : s.cross) cross.push_back(row_major(c));
  state["mean"] = std::move(mean);
  state["cov"] = std::move(cov);
  state["cross"] = std::move(cross);
  Json tau = Json::array(), sigma0 = Json::array();
  for (const auto& g : s.tau)
    tau.push_back(Json{{"p", g.p},
                       {"a", g.a},
                       {"b", g.b},
                       {"mean_inverse", g.mean_inverse}});
  for (const auto& g : s.sigma0)
    sigma0.push_back(Json{{"shape", g.shape},
                          {"rate", g.rate},
                          {"mean_inverse", g.mean_inverse}});
  state["tau"] = std::move(tau);
  state["sigma0"] = std::move(sigma0);
  if (include_xi && !s.xi.empty()) {
    Json xi = Json::array();
    for (const auto& m : s.xi) xi.push_back(row_major(m));
    state["xi"] = std::move(xi);
  }

  Json j;
  j["version"] = kArchiveVersion;
  j["config"] = config_json(archive.config);
  j["data"] = data_json(archive.data);
  j["converged"] = archive.result.converged;
  j["iterations"] = archive.result.iterations;
  j["state"] = std::move(state);
  j["trace"] = trace_json(archive.result.trace);
  return canonical(j);
}

FitArchive archive_from_json(const std::string& text) {
  const Json j = parse_json(text, "archive");
  const std::string root = "archive";
  const std::string version = str(j, "version", root);
  if (version != kArchiveVersion)
    throw DataError("archive.version: expected '" +
                    std::string(kArchiveVersion) + "', got '" + version + "'");
  FitArchive a;
  a.config = config_from(field(j, "config", root), root + ".config");

  const Json& dj = field(j, "data", root);
  const std::string dp = root + ".data";
  a.data.kind = parse_kind(str(dj, "kind", dp));
  a.data.n = integer<Index>(dj, "n", dp);
  a.data.T = integer<Index>(dj, "T", dp);
  a.data.noise_sd = num(dj, "noise_sd", dp);
  a.data.seed = integer<std::uint64_t>(dj, "seed", dp);

  const Json& conv = field(j, "converged", root);
  if (!conv.is_boolean()) throw DataError("archive.converged: expected bool");
  a.result.converged = conv.get<bool>();
  a.result.iterations = integer<int>(j, "iterations", root);

  const Json& sj = field(j, "state", root);
  const std::string sp = root + ".state";
  VariationalState& s = a.result.state;
  s.n = integer<Index>(sj, "n", sp);
  s.T = integer<Index>(sj, "T", sp);
  s.d = integer<Index>(sj, "d", sp);
  if (s.n < 1 || s.T < 1 || s.d < 1)
    throw DataError(sp + ": n, T and d must be positive");
  if (s.n != a.data.n || s.T != a.data.T || s.d != a.config.d)
    throw DataError(sp + ": dimensions disagree with data/config");
  s.beta_mean = num(sj, "beta_mean", sp);
  s.beta_var = num(sj, "beta_var", sp);
  const auto nT = static_cast<std::size_t>(s.n * s.T);
  const auto pairs = static_cast<std::size_t>(s.n * (s.T - 1));
  const Json& mean = array_of(sj, "mean", sp, nT);
  const Json& cov = array_of(sj, "cov", sp, nT);
  const Json& cross = array_of(sj, "cross", sp, pairs);
  for (std::size_t k = 0; k < nT; ++k) {
    s.mean.push_back(matrix_from(mean[k], s.d, 1, sp + ".mean"));
    s.cov.push_back(matrix_from(cov[k], s.d, s.d, sp + ".cov"));
  }
  for (std::size_t k = 0; k < pairs; ++k)
    s.cross.push_back(matrix_from(cross[k], s.d, s.d, sp + ".cross"));

  const Json& tau = field(sj, "tau", sp);
  const Json& sigma0 = field(sj, "sigma0", sp);
  const auto scale_count = [&](const Json& arr, const std::string& key) {
    if (!arr.is_array() ||
        (arr.size() != 1 && arr.size() != static_cast<std::size_t>(s.n)))
      throw DataError(sp + "." + key + ": expected 1 or n entries");
  };
  scale_count(tau, "tau");
  scale_count(sigma0, "sigma0");
  for (const auto& g : tau) {
    const std::string p = sp + ".tau";
    s.tau.push_back({num(g, "p", p), num(g, "a", p), num(g, "b", p),
                     num(g, "mean_inverse", p)});
  }
  for (const auto& g : sigma0) {
    const std::string p = sp + ".sigma0";
    s.sigma0.push_back(
        {num(g, "shape", p), num(g, "rate", p), num(g, "mean_inverse", p)});
  }
  if (sj.contains("xi")) {
    const Json& xi = array_of(sj, "xi", sp, static_cast<std::size_t>(s.T));
    for (const auto& m : xi) s.xi.push_back(matrix_from(m, s.n, s.n, sp + ".xi"));
  }

  const Json& trace = field(j, "trace", root);
  if (!trace.is_array()) throw DataError("archive.trace: expected an array");
  for (const auto& r : trace) {
    const std::string tp = root + ".trace";
    TraceRecord rec;
    rec.sweep = integer<int>(r, "sweep", tp);
    rec.statistic = num(r, "statistic", tp);
    const Json& e = field(r, "elbo", tp);
    if (!e.is_null()) rec.elbo = num(e, tp + ".elbo");
    a.result.trace.push_back(rec);
  }
  return a;
}

void save_archive(const std::string& path, const FitArchive& archive,
                  bool include_xi) {
  write_file(path, archive_to_json(archive, include_xi));
}

FitArchive load_archive(const std::string& path) {
  try {
    return archive_from_json(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string config_to_json(const ModelConfig& cfg) {
  return canonical(config_json(cfg));
}

ModelConfig config_from_json(const std::string& text) {
  return config_from(parse_json(text, "config"), "config");
}

// ---- trace / summary / metrics ----

void write_trace(std::ostream& out, const std::string& comment,
                 const std::vector<TraceRecord>& trace) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "sweep,statistic,elbo,wall_seconds\n";
  for (const auto& r : trace) {
    out << r.sweep << ',' << format_double(r.statistic) << ',';
    if (r.elbo) out << format_double(*r.elbo);
    out << ',' << format_double(r.wall_seconds) << '\n';
  }
}

void save_trace(const std::string& path, const std::string& comment,
                const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  write_trace(out, comment, trace);
  write_file(path, out.str());
}

std::string summary_json(const FitArchive& archive) {
  const VariationalState& s = archive.result.state;
  Json j;
  j["version"] = kArchiveVersion;
  j["config"] = config_json(archive.config);
  j["data"] = data_json(archive.data);
  j["converged"] = archive.result.converged;
  j["iterations"] = archive.result.iterations;
  if (!archive.result.trace.empty()) {
    const auto& last = archive.result.trace.back();
    j["final_statistic"] = last.statistic;
    j["final_elbo"] = last.elbo ? Json(*last.elbo) : Json(nullptr);
  }
  j["beta"] = Json{{"mean", s.beta_mean}, {"sd", std::sqrt(s.beta_var)}};
  Json tau = Json::array(), sigma0 = Json::array();
  for (const auto& g : s.tau)
    tau.push_back(Json{{"E_inv_tau2", g.mean_inverse},
                       {"p", g.p},
                       {"a", g.a},
                       {"b", g.b}});
  for (const auto& g : s.sigma0)
    sigma0.push_back(Json{{"E_inv_sigma02", g.mean_inverse},
                          {"shape", g.shape},
                          {"rate", g.rate}});
  j["tau"] = std::move(tau);
  j["sigma0"] = std::move(sigma0);
  Json spread = Json::array();
  for (Index t = 0; t < s.T; ++t) {
    const Eigen::MatrixXd X = s.positions(t);
    spread.push_back(std::sqrt(X.squaredNorm() / static_cast<double>(s.n)));
  }
  j["rms_position_norm_by_time"] = std::move(spread);
  return canonical(j);
}

std::string metrics_to_json(const Metrics& m) {
  Json j;
  j["count"] = m.count;
  if (m.pcc) j["pcc"] = *m.pcc;
  if (m.auc) j["auc"] = *m.auc;
  if (m.rmse) j["rmse"] = *m.rmse;
  if (m.tp_ratio) j["tp_ratio"] = *m.tp_ratio;
  if (m.rmse_inner_products)
    j["rmse_inner_products"] = *m.rmse_inner_products;
  j["scores"] = m.scores_comment;
  return canonical(j);
}

}  // namespace dynlsm::io
