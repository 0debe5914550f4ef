#include "cqnls/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cqnls/errors.hpp"

namespace cqnls {

namespace {

[[noreturn]] void fail(int line, int col, const std::string& msg) {
  std::ostringstream os;
  os << "config: line " << line << ", col " << col << ": " << msg;
  throw ConfigError(os.str());
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_num(const std::string& v, int line, int col) {
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') fail(line, col, "expected a number, got '" + v + "'");
  return x;
}

long parse_int(const std::string& v, int line, int col) {
  double x = parse_num(v, line, col);
  long n = static_cast<long>(x);
  if (n != x) fail(line, col, "expected an integer, got '" + v + "'");
  return n;
}

bool parse_bool(const std::string& v, int line, int col) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(line, col, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig rc;
  rc.text = text;
  std::istringstream in(text);
  std::string raw_line, section;
  int line_no = 0;
  bool saw_alpha = false, saw_beta = false;

  while (std::getline(in, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string body = trim(line);
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']') fail(line_no, 1, "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (section != "grid" && section != "model" && section != "evolution" &&
          section != "audits" && section != "output")
        fail(line_no, 1, "unknown section [" + section + "]");
      continue;
    }

    std::size_t eq = body.find('=');
    if (eq == std::string::npos) fail(line_no, 1, "expected key = value");
    std::string key = trim(body.substr(0, eq));
    std::string val = trim(body.substr(eq + 1));
    int vcol = static_cast<int>(line.find('=')) + 2;
    if (key.empty()) fail(line_no, 1, "empty key");
    if (val.empty()) fail(line_no, vcol, "empty value for '" + key + "'");
    if (section.empty()) fail(line_no, 1, "key '" + key + "' outside any section");

    if (section == "grid") {
      if (key == "d") rc.sim.d = static_cast<int>(parse_int(val, line_no, vcol));
      else if (key == "m") rc.sim.m = static_cast<int>(parse_int(val, line_no, vcol));
      else if (key == "L") rc.sim.L = parse_num(val, line_no, vcol);
      else fail(line_no, 1, "unknown key '" + key + "' in [grid]");
    } else if (section == "model") {
      if (key == "beta") { rc.sim.beta = parse_num(val, line_no, vcol); saw_beta = true; }
      else if (key == "alpha1") { rc.raw.alpha1 = parse_num(val, line_no, vcol); saw_alpha = true; }
      else if (key == "alpha3") { rc.raw.alpha3 = parse_num(val, line_no, vcol); saw_alpha = true; }
      else if (key == "alpha5") { rc.raw.alpha5 = parse_num(val, line_no, vcol); saw_alpha = true; }
      else fail(line_no, 1, "unknown key '" + key + "' in [model]");
    } else if (section == "evolution") {
      if (key == "dt") rc.sim.dt = parse_num(val, line_no, vcol);
      else if (key == "t_end") rc.sim.t_end = parse_num(val, line_no, vcol);
      else if (key == "eps") rc.sim.eps = parse_num(val, line_no, vcol);
      else if (key == "sigma") rc.sim.sigma = parse_num(val, line_no, vcol);
      else if (key == "nonlinear") rc.sim.nonlinear = parse_bool(val, line_no, vcol);
      else if (key == "dealias") rc.sim.dealias_rhs = parse_bool(val, line_no, vcol);
      else if (key == "diag_every") rc.sim.diag_every = static_cast<int>(parse_int(val, line_no, vcol));
      else if (key == "blowup_threshold") rc.sim.blowup_threshold = parse_num(val, line_no, vcol);
      else if (key == "seed") rc.sim.seed = static_cast<unsigned long>(parse_int(val, line_no, vcol));
      else if (key == "solver") {
        if (val == "strang") rc.sim.solver = Solver::strang;
        else if (val == "ifrk4") rc.sim.solver = Solver::ifrk4;
        else if (val == "both") rc.sim.solver = Solver::both;
        else fail(line_no, vcol, "solver must be strang|ifrk4|both");
      } else if (key == "zero_mode") {
        if (val == "track") rc.sim.zero_mode = ZeroModePolicy::track;
        else if (val == "project") rc.sim.zero_mode = ZeroModePolicy::project;
        else fail(line_no, vcol, "zero_mode must be track|project");
      } else if (key == "snapshot_times") {
        rc.sim.snapshot_times.clear();
        for (const auto& s : split_list(val))
          rc.sim.snapshot_times.push_back(parse_num(s, line_no, vcol));
      } else fail(line_no, 1, "unknown key '" + key + "' in [evolution]");
    } else if (section == "audits") {
      if (key == "phases") {
        rc.audits.phases = split_list(val);
        for (const auto& p : rc.audits.phases)
          if (p != "conj2" && p != "plain2" && p != "mixed")
            fail(line_no, vcol, "unknown phase '" + p + "'");
      } else if (key == "dyad_lo") rc.audits.dyad_lo = parse_num(val, line_no, vcol);
      else if (key == "dyad_hi") rc.audits.dyad_hi = parse_num(val, line_no, vcol);
      else if (key == "n_samples") rc.audits.n_samples = static_cast<int>(parse_int(val, line_no, vcol));
      else if (key == "a_variant") rc.audits.a_variant = static_cast<int>(parse_int(val, line_no, vcol));
      else if (key == "mixed_C") rc.audits.mixed_C = parse_num(val, line_no, vcol);
      else fail(line_no, 1, "unknown key '" + key + "' in [audits]");
    } else {  // output
      if (key == "dir") rc.out_dir = val;
      else if (key == "prefix") rc.prefix = val;
      else fail(line_no, 1, "unknown key '" + key + "' in [output]");
    }
  }

  if (saw_alpha && saw_beta)
    throw ConfigError("config: [model] gives both beta and raw alpha coefficients");
  rc.use_raw = saw_alpha;
  if (rc.use_raw) rc.sim.beta = normalize(rc.raw).beta;

  if (rc.sim.d < 1 || rc.sim.d > 3) throw ConfigError("config: d must be 1..3");
  if (rc.sim.m < 2 || (rc.sim.m & (rc.sim.m - 1)) != 0)
    throw ConfigError("config: m must be a power of two");
  if (!(rc.sim.L > 0)) throw ConfigError("config: L must be positive");
  if (!(rc.sim.dt > 0)) throw ConfigError("config: dt must be positive");
  if (!(rc.sim.t_end >= 0)) throw ConfigError("config: t_end must be nonnegative");
  if (rc.audits.a_variant != 1 && rc.audits.a_variant != 2)
    throw ConfigError("config: a_variant must be 1 or 2");
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace cqnls
