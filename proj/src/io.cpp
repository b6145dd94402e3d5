#include "reeblab/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace reeblab::io {

using nlohmann::json;

namespace {

void write_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::istream& is, void* p, std::size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw std::runtime_error("truncated payload");
}

}  // namespace

std::string profile_to_json(const BindingProfile& p) {
  json j;
  switch (p.kind) {
    case ProfileKind::example1:
      j["kind"] = "example1";
      break;
    case ProfileKind::example2:
      j["kind"] = "example2";
      break;
    case ProfileKind::spline:
      j["kind"] = "spline";
      break;
  }
  j["T"] = p.T;
  j["k"] = p.k;
  j["delta"] = p.delta;
  j["r_max"] = p.r_max;
  j["knots"] = json::array();
  for (const auto& kn : p.knots) j["knots"].push_back({kn.r, kn.g1, kn.dg1, kn.g2, kn.dg2});
  return j.dump();
}

BindingProfile profile_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("profile JSON parse error: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::runtime_error("profile schema error: missing string field 'kind'");
  const std::string kind = j["kind"];
  BindingProfile p;
  if (kind == "example1")
    p.kind = ProfileKind::example1;
  else if (kind == "example2")
    p.kind = ProfileKind::example2;
  else if (kind == "spline")
    p.kind = ProfileKind::spline;
  else
    throw std::runtime_error("profile schema error: unknown kind '" + kind + "'");

  auto get_num = [&](const char* field, double dflt, bool required) {
    if (!j.contains(field)) {
      if (required) throw std::runtime_error(std::string("profile schema error: missing '") +
                                             field + "'");
      return dflt;
    }
    if (!j[field].is_number())
      throw std::runtime_error(std::string("profile schema error: field '") + field +
                               "' must be a number");
    return j[field].get<double>();
  };
  p.T = get_num("T", 1.0, p.kind != ProfileKind::spline);
  p.k = get_num("k", 1.0, p.kind != ProfileKind::spline);
  p.delta = get_num("delta", 0.0, false);
  p.r_max = get_num("r_max", 1.0, true);
  if (!(p.r_max > 0.0) || p.r_max > 1.0)
    throw std::runtime_error("profile schema error: r_max must lie in (0, 1]");

  if (p.kind == ProfileKind::spline) {
    if (!j.contains("knots") || !j["knots"].is_array())
      throw std::runtime_error("profile schema error: spline kind requires 'knots' array");
    std::size_t idx = 0;
    for (const auto& row : j["knots"]) {
      if (!row.is_array() || row.size() != 5)
        throw std::runtime_error("profile schema error: knot " + std::to_string(idx) +
                                 " must be [r, g1, dg1, g2, dg2]");
      SplineKnot kn{row[0].get<double>(), row[1].get<double>(), row[2].get<double>(),
                    row[3].get<double>(), row[4].get<double>()};
      if (!p.knots.empty() && !(kn.r > p.knots.back().r))
        throw std::runtime_error("profile schema error: knots not sorted at index " +
                                 std::to_string(idx));
      p.knots.push_back(kn);
      ++idx;
    }
    p.rebuild_spline();
  } else {
    // closed-form kinds revalidate their parameter constraints
    p = make_example_profile(p.kind, p.T, p.k);
    p.delta = get_num("delta", 0.0, false);
    p.r_max = get_num("r_max", p.r_max, false);
  }
  return p;
}

BindingProfile parse_profile_file(const std::string& path) {
  // file and schema problems are configuration errors for the CLI
  try {
    return profile_from_json(read_file(path));
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
}

void write_profile_file(const BindingProfile& p, const std::string& path) {
  write_file(path, profile_to_json(p));
}

void write_grid(const GridField& g, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os.write("QCG1", 4);
  const std::uint32_t n = static_cast<std::uint32_t>(g.n());
  const double L = g.extent();
  write_bytes(os, &n, 4);
  write_bytes(os, &L, 8);
  for (const auto& z : g.raw()) {
    const double re = z.real(), im = z.imag();
    write_bytes(os, &re, 8);
    write_bytes(os, &im, 8);
  }
}

GridField read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  read_bytes(is, magic, 4);
  if (std::memcmp(magic, "QCG1", 4) != 0) throw std::runtime_error("grid format error: bad magic");
  std::uint32_t n = 0;
  double L = 0.0;
  read_bytes(is, &n, 4);
  read_bytes(is, &L, 8);
  if (!is_power_of_two(n)) throw std::runtime_error("grid format error: n must be a power of two");
  GridField g(n, L);
  for (auto& z : g.raw()) {
    double re, im;
    read_bytes(is, &re, 8);
    read_bytes(is, &im, 8);
    z = {re, im};
  }
  return g;
}

void write_half_cylinder(const HalfCylinderField& f, const std::string& path) {
  f.check();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os.write("HCF1", 4);
  const std::uint32_t rows = static_cast<std::uint32_t>(f.s_grid.size());
  const std::uint32_t cols = static_cast<std::uint32_t>(f.n_t);
  write_bytes(os, &rows, 4);
  write_bytes(os, &cols, 4);
  for (double s : f.s_grid) write_bytes(os, &s, 8);
  for (const auto& row : f.values)
    for (const auto& z : row) {
      const double re = z.real(), im = z.imag();
      write_bytes(os, &re, 8);
      write_bytes(os, &im, 8);
    }
}

HalfCylinderField read_half_cylinder(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  read_bytes(is, magic, 4);
  if (std::memcmp(magic, "HCF1", 4) != 0)
    throw std::runtime_error("half-cylinder format error: bad magic");
  std::uint32_t rows = 0, cols = 0;
  read_bytes(is, &rows, 4);
  read_bytes(is, &cols, 4);
  HalfCylinderField f;
  f.n_t = cols;
  f.s_grid.resize(rows);
  for (auto& s : f.s_grid) read_bytes(is, &s, 8);
  f.values.assign(rows, std::vector<cplx>(cols));
  for (auto& row : f.values)
    for (auto& z : row) {
      double re, im;
      read_bytes(is, &re, 8);
      read_bytes(is, &im, 8);
      z = {re, im};
    }
  f.check();
  return f;
}

void write_torus_field(const TorusField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  json hdr;
  hdr["N"] = f.N();
  hdr["real_flag"] = f.real_flag();
  const std::string h = hdr.dump();
  const std::uint32_t len = static_cast<std::uint32_t>(h.size());
  write_bytes(os, &len, 4);
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  for (const auto& z : f.raw()) {
    const double re = z.real(), im = z.imag();
    write_bytes(os, &re, 8);
    write_bytes(os, &im, 8);
  }
}

TorusField read_torus_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::uint32_t len = 0;
  read_bytes(is, &len, 4);
  std::string h(len, '\0');
  read_bytes(is, h.data(), len);
  const json hdr = json::parse(h);
  TorusField f(hdr.at("N").get<int>(), hdr.at("real_flag").get<bool>());
  for (auto& z : f.raw()) {
    double re, im;
    read_bytes(is, &re, 8);
    read_bytes(is, &im, 8);
    z = {re, im};
  }
  return f;
}

void write_cr_solution(const CRSolution& sol, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_torus_field(sol.zeta, dir + "/zeta.tfc");
  write_torus_field(sol.gamma.comp_s, dir + "/gamma_s.tfc");
  write_torus_field(sol.gamma.comp_t, dir + "/gamma_t.tfc");
  json rep;
  rep["residual"] = sol.residual;
  rep["harmonic_residual"] = sol.harmonic_residual;
  rep["newton_iterations"] = sol.newton_iterations;
  rep["gamma_class"] = {sol.gamma_class[0], sol.gamma_class[1]};
  write_file(dir + "/residuals.json", rep.dump());
}

CRSolution read_cr_solution(const std::string& dir) {
  CRSolution sol;
  sol.zeta = read_torus_field(dir + "/zeta.tfc");
  sol.gamma.comp_s = read_torus_field(dir + "/gamma_s.tfc");
  sol.gamma.comp_t = read_torus_field(dir + "/gamma_t.tfc");
  const json rep = json::parse(read_file(dir + "/residuals.json"));
  sol.residual = rep.at("residual").get<double>();
  sol.harmonic_residual = rep.at("harmonic_residual").get<double>();
  sol.newton_iterations = rep.at("newton_iterations").get<int>();
  sol.gamma_class = {rep.at("gamma_class")[0].get<double>(),
                     rep.at("gamma_class")[1].get<double>()};
  return sol;
}

void write_leaf_csv(const LeafProfile& lp, const std::string& path) {
  std::ostringstream os;
  os.precision(17);
  os << "s,r,a\n";
  for (std::size_t i = 0; i < lp.s_grid.size(); ++i)
    os << lp.s_grid[i] << "," << lp.r_of_s[i] << "," << lp.a_of_s[i] << "\n";
  write_file(path, os.str());
}

void write_leaf_meta(const LeafProfile& lp, const std::string& path) {
  json j;
  j["kappa"] = lp.kappa;
  j["kappa_hat"] = lp.kappa_hat;
  j["c_inf"] = lp.c_inf;
  j["step"] = lp.step;
  j["samples"] = lp.s_grid.size();
  write_file(path, j.dump());
}

void write_loop_csv(const LoopField& loop, const std::string& path) {
  std::ostringstream os;
  os.precision(17);
  os << "t,x,y\n";
  for (std::size_t j = 0; j < loop.size(); ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(loop.size());
    os << t << "," << loop.values[j].real() << "," << loop.values[j].imag() << "\n";
  }
  write_file(path, os.str());
}

LoopField read_loop_csv(const std::string& path) {
  std::istringstream is(read_file(path));
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x,y", 0) != 0)
    throw std::runtime_error("loop CSV: bad header");
  LoopField loop;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double t, x, y;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &y) != 3)
      throw std::runtime_error("loop CSV: bad row");
    loop.values.emplace_back(x, y);
  }
  loop.check();
  return loop;
}

PageSample read_page_csv(const std::string& path) {
  std::istringstream is(read_file(path));
  std::string line;
  if (!std::getline(is, line) || line.rfind("a,b", 0) != 0)
    throw std::runtime_error("page CSV: bad header");
  PageSample page;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double a, b;
    if (std::sscanf(line.c_str(), "%lf,%lf", &a, &b) != 2)
      throw std::runtime_error("page CSV: bad row");
    page.a.push_back(a);
    page.b.push_back(b);
  }
  return page;
}

std::string canonical_json(const std::string& already_json_text) {
  // nlohmann objects keep keys sorted; re-serialize for a canonical byte form
  return json::parse(already_json_text).dump();
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace reeblab::io
