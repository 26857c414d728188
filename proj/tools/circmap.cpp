#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "circmap/caratheodory.hpp"
#include "circmap/proper_maps.hpp"
#include "verification.hpp"

using namespace circmap;

namespace {

struct Params {
  std::string domain_path;
  std::string output;
  int L = -1;
  int N = 24;
  int M = 256;
  std::uint64_t seed = 1;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(Complex z) { return num(z.real()) + "," + num(z.imag()); }

Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw DomainError("cannot parse complex number '" + s + "'");
  }
}

std::vector<Complex> parse_complex_list(const std::string& s) {
  std::istringstream in(s);
  std::vector<Complex> out;
  for (std::string tok; in >> tok;) out.push_back(parse_complex(tok));
  return out;
}

std::vector<double> parse_reals(std::string s, char sep) {
  for (char& c : s) {
    if (c == sep) c = ' ';
  }
  std::istringstream in(s);
  std::vector<double> out;
  for (std::string tok; in >> tok;) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw DomainError("cannot parse number '" + tok + "'");
    }
  }
  return out;
}

BoundaryDegree parse_nu(const std::string& s) {
  BoundaryDegree nu;
  for (double x : parse_reals(s, ',')) nu.push_back(static_cast<int>(x));
  return nu;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Params& p, const std::string& text) {
  if (p.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(p.output, std::ios::binary);
  if (!out) throw DomainError("cannot write " + p.output);
  out << text;
}

struct Context {
  CircularDomain d;
  HarmonicModel m;
  IntegralsFirstKind v;
  PrimeEvaluator ev;

  explicit Context(const Params& p)
      : d(load_domain(p.domain_path)), m(solve_harmonic_measures(d, p.N, p.M)), v(m), ev(d, p.L) {}
};

CircularDomain checked_domain(const Params& p) {
  CircularDomain d = load_domain(p.domain_path);
  require_valid(d);
  return d;
}

std::string map_summary(const ProperMap& f, const CircularDomain& d) {
  nlohmann::json j = nlohmann::json::parse(zero_config_to_json_text(f.config()));
  j["rotation"] = {f.rotation().real(), f.rotation().imag()};
  j["form"] = f.form();
  j["condition_residual"] = f.config().max_residual();
  j["boundary_deviation"] = boundary_modulus_deviation(f, d, 256);
  std::vector<int> windings;
  for (int l = 0; l <= d.genus(); ++l) windings.push_back(boundary_degree(f, d, l));
  j["windings"] = windings;
  return j.dump(2) + "\n";
}

int run_verify(const std::string& suite, const Params& p) {
  const auto criteria = verify::run_suite(suite, verify::library_oracles(), p.seed);
  std::string table = verify::format_table(criteria);
  bool ok = true;
  for (const auto& c : criteria) {
    for (const auto& n : c.notes) table += "    " + n + "\n";
    if (!c.soft) ok = ok && c.passed();
  }
  std::cout << table;
  if (!p.output.empty()) emit(p, table);
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proper holomorphic maps of circular domains and Caratheodory balls"};
  app.require_subcommand(1);
  app.fallthrough();
  Params p;
  app.add_option("--seed", p.seed, "Seed for optimizer multistarts");
  app.add_option("-o,--output", p.output, "Output file");
  app.add_option("-L", p.L, "Word length (negative: adaptive)");
  app.add_option("-N", p.N, "Harmonic basis order");
  app.add_option("-M", p.M, "Boundary collocation points");

  auto domain_flag = [&](CLI::App* c) { c->add_option("--domain", p.domain_path, "Domain JSON")->required(); };

  auto* validate = app.add_subcommand("validate", "Check a domain and report separation");
  domain_flag(validate);

  std::string z_text;
  std::string y_text;
  int slit = 0;
  auto* omega = app.add_subcommand("omega", "Evaluate the prime function");
  domain_flag(omega);
  omega->add_option("--z", z_text)->required();
  omega->add_option("--y", y_text)->required();

  auto* eta_cmd = app.add_subcommand("eta", "Evaluate a circular slit map");
  domain_flag(eta_cmd);
  eta_cmd->add_option("--z", z_text)->required();
  eta_cmd->add_option("--p", y_text)->required();
  eta_cmd->add_option("--slit", slit, "Boundary sent to the unit circle");

  std::string zeros_text;
  std::string nu_text;
  auto* build = app.add_subcommand("proper-build", "Build a proper map from admissible zeros");
  domain_flag(build);
  build->add_option("--zeros", zeros_text, "\"re,im re,im ...\"")->required();
  build->add_option("--nu", nu_text, "n0,n1,...")->required();
  build->add_flag("--complete", "Treat the last g zeros as guesses and solve for them");

  std::string config_path;
  auto* eval = app.add_subcommand("proper-eval", "Evaluate a proper map at points");
  domain_flag(eval);
  eval->add_option("--config", config_path, "ZeroConfig JSON")->required();
  eval->add_option("--z", z_text, "\"re,im re,im ...\"")->required();

  std::string w_text;
  std::string lambda_text;
  auto* fb = app.add_subcommand("from-boundary", "Map with one zero and prescribed boundary level points");
  domain_flag(fb);
  fb->add_option("--p", y_text)->required();
  fb->add_option("--w", w_text, "boundary points, assigned to their nearest circle")->required();
  fb->add_option("--lambda", lambda_text, "derivative ratios for the non-leading points, in order");

  int seeds = 8;
  auto* dist = app.add_subcommand("cball-dist", "Moebius and Caratheodory distance");
  domain_flag(dist);
  dist->add_option("--base", y_text)->required();
  dist->add_option("--z", z_text)->required();
  dist->add_option("--seeds", seeds);

  double threshold = 0.5;
  int res = 300;
  std::string bbox_text;
  auto* raster = app.add_subcommand("cball-raster", "Rasterize c*(center, .) and label the ball");
  domain_flag(raster);
  raster->add_option("--center", y_text)->required();
  raster->add_option("--r", threshold)->required();
  raster->add_option("--res", res);
  raster->add_option("--bbox", bbox_text, "x0,y0,x1,y1");
  raster->add_option("--seeds", seeds);

  std::string raster_path;
  auto* witness = app.add_subcommand("find-witness", "Search the shrinking-circle family for a disconnected ball");
  witness->add_option("--res", res);
  witness->add_option("--raster", raster_path, "CSV file for the raster");
  witness->add_option("--seeds", seeds);

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run a verification suite");
  verify_cmd->add_option("suite", suite, "disk, annulus, triply or witness")
      ->required()
      ->check(CLI::IsMember({"disk", "annulus", "triply", "witness"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    DistanceOptions dopts;
    dopts.seed = p.seed;
    dopts.seeds = seeds;

    if (validate->parsed()) {
      const CircularDomain d = load_domain(p.domain_path);
      const ValidationReport r = validate_domain(d);
      std::cout << "valid " << (r.is_valid ? "true" : "false") << "\n";
      std::cout << "separation " << num(r.separation) << "\n";
      std::cout << "convergence_class " << to_string(r.convergence_class) << "\n";
      for (const auto& m : r.messages) std::cout << m << "\n";
      if (!p.output.empty()) emit(p, domain_to_json_text(d));
      return r.is_valid ? 0 : 1;
    }
    if (omega->parsed()) {
      const PrimeEvaluator ev(checked_domain(p), p.L);
      std::cout << num(ev.omega(parse_complex(z_text), parse_complex(y_text))) << "\n";
      return 0;
    }
    if (eta_cmd->parsed()) {
      const PrimeEvaluator ev(checked_domain(p), p.L);
      std::cout << num(eta_l(ev, slit, parse_complex(z_text), parse_complex(y_text))) << "\n";
      return 0;
    }
    if (build->parsed()) {
      require_valid(checked_domain(p));
      const Context c(p);
      std::vector<Complex> zeros = parse_complex_list(zeros_text);
      const BoundaryDegree nu = parse_nu(nu_text);
      if (build->count("--complete") > 0) {
        const std::size_t g = static_cast<std::size_t>(c.d.genus());
        if (zeros.size() < g) throw DomainError("--complete needs at least g guesses");
        const std::vector<Complex> fixed(zeros.begin(), zeros.end() - static_cast<std::ptrdiff_t>(g));
        const std::vector<Complex> guess(zeros.end() - static_cast<std::ptrdiff_t>(g), zeros.end());
        zeros = fixed;
        for (const Complex& q : complete_zeros(c.m, fixed, nu, guess)) zeros.push_back(q);
      }
      const ProperMap f = build_proper_map(c.ev, c.v, make_zero_config(c.m, zeros, nu));
      emit(p, map_summary(f, c.d));
      return 0;
    }
    if (eval->parsed()) {
      require_valid(checked_domain(p));
      const Context c(p);
      const ZeroConfig cfg = zero_config_from_json_text(read_file(config_path));
      const ProperMap f = build_proper_map(c.ev, c.v, make_zero_config(c.m, cfg.zeros, cfg.nu));
      std::string out;
      for (const Complex& z : parse_complex_list(z_text)) out += num(z) + " " + num(f(z)) + "\n";
      emit(p, out);
      return 0;
    }
    if (fb->parsed()) {
      require_valid(checked_domain(p));
      const Context c(p);
      std::vector<std::vector<Complex>> w(static_cast<std::size_t>(c.d.genus() + 1));
      for (const Complex& x : parse_complex_list(w_text)) {
        w[static_cast<std::size_t>(c.d.nearest_boundary(x).second)].push_back(x);
      }
      const std::vector<double> ratios = parse_reals(lambda_text, ' ');
      std::vector<std::vector<double>> lambda(w.size());
      std::size_t next = 0;
      for (std::size_t l = 0; l < w.size(); ++l) {
        for (std::size_t k = 1; k < w[l].size(); ++k) {
          if (next >= ratios.size()) break;
          lambda[l].push_back(ratios[next++]);
        }
      }
      if (!ratios.empty() && next != ratios.size()) throw DomainError("wrong number of derivative ratios");
      if (ratios.empty()) lambda.clear();
      BoundaryDataResult r;
      const ProperMap f = from_boundary_data(c.m, c.ev, c.v, parse_complex(y_text), w, lambda, {}, &r);
      nlohmann::json j = nlohmann::json::parse(map_summary(f, c.d));
      j["boundary_error"] = r.boundary_error;
      j["zero_error"] = r.zero_error;
      j["ratio_error"] = r.ratio_error;
      emit(p, j.dump(2) + "\n");
      return 0;
    }
    if (dist->parsed()) {
      require_valid(checked_domain(p));
      const Context c(p);
      const DistanceSolver solver(c.m, c.ev, c.v);
      const DistanceResult r = solver.distance(parse_complex(y_text), parse_complex(z_text), dopts);
      std::cout << "mobius " << num(r.value) << "\n";
      std::cout << "caratheodory " << num(caratheodory_from_mobius(r.value)) << "\n";
      std::cout << "argmax";
      for (const Complex& q : r.argmax) std::cout << " " << num(q);
      std::cout << "\n";
      return 0;
    }
    if (raster->parsed()) {
      require_valid(checked_domain(p));
      const Context c(p);
      BoundingBox box;
      if (!bbox_text.empty()) {
        const auto b = parse_reals(bbox_text, ',');
        if (b.size() != 4) throw DomainError("--bbox expects x0,y0,x1,y1");
        box = {b[0], b[1], b[2], b[3]};
      }
      const DistanceSolver solver(c.m, c.ev, c.v);
      const BallRaster r = ball_raster(solver, parse_complex(y_text), threshold, box, res, res, {dopts, 0});
      emit(p, raster_to_csv(r));
      if (!p.output.empty()) std::cout << "components " << r.components << "\n";
      return 0;
    }
    if (witness->parsed()) {
      WitnessOptions wo;
      wo.resolution = res;
      wo.distance = dopts;
      const Witness w = find_disconnected_ball(wo);
      emit(p, witness_to_json(w));
      if (!raster_path.empty() && !w.raster.values.empty()) {
        std::ofstream out(raster_path, std::ios::binary);
        out << raster_to_csv(w.raster);
      }
      if (!p.output.empty()) {
        std::cout << "found " << (w.found ? "true" : "false") << "\n";
        for (const auto& line : w.log) std::cout << line << "\n";
      }
      return w.found ? 0 : 3;
    }
    if (verify_cmd->parsed()) return run_verify(suite, p);
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
