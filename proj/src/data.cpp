#include "bitr/data.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace bitr {

namespace {

void check_observation(const Observation& o, int p, std::size_t row) {
  auto where = [&] { return " (row " + std::to_string(row + 1) + ")"; };
  if (!(o.y1 > 0.0) || !std::isfinite(o.y1))
    throw ValidationError("y1 must be a positive finite time" + where());
  if (!(o.y2 > 0.0) || !std::isfinite(o.y2))
    throw ValidationError("y2 must be a positive finite time" + where());
  if ((o.delta1 != 0 && o.delta1 != 1) || (o.delta2 != 0 && o.delta2 != 1))
    throw ValidationError("event indicators must be 0 or 1" + where());
  if (o.a < 0) throw ValidationError("arm index must be non-negative" + where());
  if (static_cast<int>(o.x.size()) != p)
    throw ValidationError("covariate length " + std::to_string(o.x.size()) +
                          " does not match p = " + std::to_string(p) + where());
  for (double v : o.x)
    if (!std::isfinite(v)) throw ValidationError("non-finite covariate" + where());
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no, const std::string& column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty())
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + s +
                     "' in column " + column);
  return v;
}

int parse_int(const std::string& s, std::size_t line_no, const std::string& column) {
  double v = parse_number(s, line_no, column);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ParseError("line " + std::to_string(line_no) + ": column " + column +
                     " must be an integer, got '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

Dataset::Dataset(std::vector<Observation> observations, int p, int K)
    : obs_(std::move(observations)), p_(p) {
  if (p < 0) throw ValidationError("p must be non-negative");
  int max_arm = 0;
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    check_observation(obs_[i], p_, i);
    max_arm = std::max(max_arm, obs_[i].a);
  }
  if (K >= 0) {
    if (max_arm > K)
      throw ValidationError("arm " + std::to_string(max_arm) + " present but K = " +
                            std::to_string(K));
    K_ = K;
  } else {
    K_ = max_arm;
  }
}

std::size_t Dataset::arm_size(int a) const {
  return static_cast<std::size_t>(
      std::count_if(obs_.begin(), obs_.end(), [a](const Observation& o) { return o.a == a; }));
}

WeightConfig::WeightConfig(double c1_, double c2_) : c1(c1_), c2(c2_) {
  if (!std::isfinite(c1) || !std::isfinite(c2))
    throw ValidationError("weight configuration must be finite");
}

std::string WeightConfig::label() const {
  return "(" + format_double(c1) + "," + format_double(c2) + ")";
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

Dataset parse_dataset(const std::string& text, int expected_K) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError("line 1: missing header");

  const char* required[] = {"y1", "y2", "d1", "d2", "a"};
  for (std::size_t k = 0; k < 5; ++k) {
    if (header.size() <= k || header[k] != required[k])
      throw ParseError("line " + std::to_string(line_no) + ": missing column '" +
                       required[k] + "' (expected header y1,y2,d1,d2,a,x1..xp)");
  }
  const int p = static_cast<int>(header.size()) - 5;
  for (int k = 0; k < p; ++k) {
    const std::string want = "x" + std::to_string(k + 1);
    if (header[5 + k] != want)
      throw ParseError("line " + std::to_string(line_no) + ": expected column '" + want +
                       "', found '" + header[5 + k] + "'");
  }

  std::vector<Observation> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto f = split_fields(line);
    if (f.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(f.size()));
    Observation o;
    o.y1 = parse_number(f[0], line_no, "y1");
    o.y2 = parse_number(f[1], line_no, "y2");
    o.delta1 = parse_int(f[2], line_no, "d1");
    o.delta2 = parse_int(f[3], line_no, "d2");
    o.a = parse_int(f[4], line_no, "a");
    o.x.resize(p);
    for (int k = 0; k < p; ++k) o.x[k] = parse_number(f[5 + k], line_no, header[5 + k]);
    try {
      check_observation(o, p, rows.size());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    rows.push_back(std::move(o));
  }
  return Dataset(std::move(rows), p, expected_K);
}

Dataset load_dataset(const std::filesystem::path& path, int expected_K) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), expected_K);
}

std::vector<std::vector<double>> parse_covariates(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError("line 1: missing header");

  std::vector<std::size_t> cols;
  for (int k = 1;; ++k) {
    const auto it = std::find(header.begin(), header.end(), "x" + std::to_string(k));
    if (it == header.end()) break;
    cols.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  if (cols.empty()) throw ParseError("line " + std::to_string(line_no) + ": missing column 'x1'");

  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_fields(line);
    if (f.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(f.size()));
    std::vector<double> x(cols.size());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      x[k] = parse_number(f[cols[k]], line_no, header[cols[k]]);
      if (!std::isfinite(x[k]))
        throw ValidationError("line " + std::to_string(line_no) + ": non-finite covariate");
    }
    rows.push_back(std::move(x));
  }
  return rows;
}

std::vector<std::vector<double>> load_covariates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_covariates(ss.str());
}

std::string format_dataset(const Dataset& d) {
  std::string out = "y1,y2,d1,d2,a";
  for (int k = 0; k < d.p(); ++k) out += ",x" + std::to_string(k + 1);
  out += '\n';
  for (const auto& o : d) {
    out += format_double(o.y1) + ',' + format_double(o.y2) + ',' + std::to_string(o.delta1) +
           ',' + std::to_string(o.delta2) + ',' + std::to_string(o.a);
    for (double v : o.x) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_dataset(d);
}

Dataset split_by_arm(const Dataset& d, int a) {
  if (a < 0 || a > d.K())
    throw std::invalid_argument("arm " + std::to_string(a) + " outside 0.." +
                                std::to_string(d.K()));
  std::vector<Observation> rows;
  for (const auto& o : d)
    if (o.a == a) rows.push_back(o);
  if (rows.empty()) throw EmptyArmError("arm " + std::to_string(a) + " has no observations");
  return Dataset(std::move(rows), d.p(), d.K());
}

ValidationReport validate(const Dataset& d) {
  ValidationReport r;
  r.n = d.size();
  r.p = d.p();
  r.K = d.K();
  r.empty = d.empty();
  if (d.empty()) return r;

  std::map<int, std::array<std::size_t, 2>> censored;
  std::size_t c1 = 0, c2 = 0;
  r.covariate_ranges.assign(d.p(), {std::numeric_limits<double>::infinity(),
                                    -std::numeric_limits<double>::infinity()});
  for (const auto& o : d) {
    ++r.arm_sizes[o.a];
    auto& c = censored[o.a];
    c[0] += o.delta1 == 0;
    c[1] += o.delta2 == 0;
    c1 += o.delta1 == 0;
    c2 += o.delta2 == 0;
    for (int k = 0; k < d.p(); ++k) {
      r.covariate_ranges[k].first = std::min(r.covariate_ranges[k].first, o.x[k]);
      r.covariate_ranges[k].second = std::max(r.covariate_ranges[k].second, o.x[k]);
    }
  }
  for (const auto& [a, n_a] : r.arm_sizes) {
    const auto& c = censored[a];
    r.censoring_rates[a] = {static_cast<double>(c[0]) / n_a, static_cast<double>(c[1]) / n_a};
  }
  r.overall_censoring1 = static_cast<double>(c1) / r.n;
  r.overall_censoring2 = static_cast<double>(c2) / r.n;
  return r;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os << "n = " << n << ", p = " << p << ", K = " << K << '\n';
  if (empty) {
    os << "WARNING: dataset is empty (n = 0)\n";
    return os.str();
  }
  os << "censoring rate: outcome 1 = " << overall_censoring1
     << ", outcome 2 = " << overall_censoring2 << '\n';
  for (const auto& [a, size] : arm_sizes) {
    const auto& [r1, r2] = censoring_rates.at(a);
    os << "arm " << a << ": n = " << size << ", censoring = (" << r1 << ", " << r2 << ")\n";
  }
  for (std::size_t k = 0; k < covariate_ranges.size(); ++k)
    os << "x" << k + 1 << " in [" << covariate_ranges[k].first << ", "
       << covariate_ranges[k].second << "]\n";
  return os.str();
}

}  // namespace bitr
