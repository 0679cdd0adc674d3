// Command-line front end: verify, demo, report, perturb, bracket.

#include "stringtop/harness.hpp"
#include "stringtop/signs.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace stringtop;

namespace {

IVec parse_class(const std::string &s) {
  IVec out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ','))
    try {
      out.push_back(std::stol(part));
    } catch (const std::exception &) {
      throw ConfigError("bad class '" + s + "', expected m,n");
    }
  if (out.size() != 2)
    throw ConfigError("bad class '" + s + "', expected m,n");
  return out;
}

void emit(const Report &r, const std::string &format, const std::string &out) {
  const std::string text =
      format == "text" ? to_text(r) : to_json(r).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f)
    throw ConfigError("cannot write " + out);
  f << text;
}

std::string class_str(const IVec &c) {
  std::string s = "(";
  for (size_t i = 0; i < c.size(); ++i)
    s += (i ? "," : "") + std::to_string(c[i]);
  return s + ")";
}

int demo_torus(const std::vector<std::string> &classes, int n,
               std::uint64_t seed, const TransportPlan &plan) {
  if (classes.size() != 2)
    throw ConfigError("demo torus needs exactly two --class options");
  const IVec c1 = parse_class(classes[0]), c2 = parse_class(classes[1]);
  Rng rng(seed);
  const Space torus = Space::torus(2);
  const PLLoop g1 = gen_random_loop(torus, c1, 4, rng);
  const PLLoop g2 = gen_random_loop(torus, c2, 4, rng);
  const FlatConnection a = random_commuting_connection(n, 2, rng);

  const auto pts = intersections(g1, g2);
  std::cout << "loops of class " << class_str(c1) << " and " << class_str(c2)
            << ", " << pts.size() << " crossings\n";
  for (const auto &p : pts)
    std::cout << "  s=" << rational_to_string(p.s)
              << " sbar=" << rational_to_string(p.sbar) << " sign "
              << (p.sign > 0 ? "+" : "-") << "\n";
  const auto reduced =
      string_bracket(StringCycle::single(g1), StringCycle::single(g2))
          .reduced();
  std::cout << "string bracket by class:";
  if (reduced.empty())
    std::cout << " 0";
  for (const auto &[cls, k] : reduced)
    std::cout << " " << k << "*" << class_str(cls);
  const GoldmanTerm g = goldman_torus(c1, c2);
  std::cout << "\nGoldman oracle: " << g.coefficient << "*" << class_str(g.cls)
            << "\n";
  const MainTheoremResult m = main_theorem_check(
      StringCycle::single(g1), StringCycle::single(g2), a, plan);
  std::cout << "Wilson bracket        " << to_string(m.lhs) << "\n"
            << "Wilson of the bracket " << to_string(m.rhs) << "\n"
            << "relative residual     " << m.residual / m.scale << "\n";
  return m.residual / m.scale <= 1e-9 ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"stringtop: string topology and Wilson loop verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SuiteConfig cfg;
  std::string format = "text", out, in_path;
  std::vector<std::string> selection;
  std::vector<int> n_list;
  std::vector<std::string> inst_overrides;
  int steps = cfg.plan.steps;
  double tol = cfg.plan.tol;
  std::optional<std::uint64_t> seed;

  auto suite_flags = [&](CLI::App *sub) {
    sub->add_option("--seed", seed, "seed (default: STRINGTOP_SEED or built-in)");
    sub->add_option("--n", n_list, "representation dimensions, e.g. 1,2,3")
        ->delimiter(',')
        ->expected(1)
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--instances", inst_overrides,
                    "instance counts: N for all checks or check=N")
        ->expected(1)
        ->allow_extra_args(false)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sub->add_option("--steps", steps, "transport steps per piece")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", tol, "Richardson tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  };

  auto *verify = app.add_subcommand("verify", "run verification checks");
  verify->add_option("checks", selection, "checks to run (default: all)");
  suite_flags(verify);
  verify->add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--out", out, "write the report to a file");
  verify->add_flag_callback("--list", [] {
    for (const auto &c : check_names())
      std::cout << c << "  " << check_description(c) << "\n";
    std::exit(0);
  }, "list checks and exit");

  auto *report = app.add_subcommand("report", "render a report");
  report->add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  report->add_option("--in", in_path, "saved JSON report (default: run all)");
  suite_flags(report);

  std::vector<std::string> classes;
  int demo_n = 2;
  auto *demo = app.add_subcommand("demo", "worked examples");
  demo->require_subcommand(1);
  auto *torus = demo->add_subcommand("torus", "bracket of two torus loops");
  torus->add_option("--class", classes, "lattice class m,n (twice)")
      ->required()
      ->expected(1)
        ->allow_extra_args(false)
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  torus->add_option("--n", demo_n, "representation dimension")
      ->check(CLI::Range(1, 6));
  torus->add_option("--seed", seed, "seed");

  std::string loopfile;
  auto *perturb = app.add_subcommand("perturb", "perturb a loop file");
  perturb->add_option("loopfile", loopfile, "loop JSON")->required();
  perturb->add_option("--seed", seed, "seed");

  std::string loop_a, loop_b;
  auto *bracket = app.add_subcommand("bracket", "string bracket of two loops");
  bracket->add_option("loop_a", loop_a, "loop JSON")->required();
  bracket->add_option("loop_b", loop_b, "loop JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.seed = seed ? *seed : SuiteConfig::default_seed();
    if (!n_list.empty())
      cfg.n_list = n_list;
    cfg.plan.steps = steps;
    cfg.plan.tol = tol;
    for (const auto &o : inst_overrides) {
      const auto eq = o.find('=');
      try {
        if (eq == std::string::npos) {
          for (const auto &c : check_names())
            cfg.instances[c] = std::stoi(o);
        } else {
          cfg.instances[o.substr(0, eq)] = std::stoi(o.substr(eq + 1));
        }
      } catch (const std::invalid_argument &) {
        throw ConfigError("bad --instances value '" + o + "'");
      }
    }

    if (*verify) {
      if (selection.empty())
        selection = check_names();
      const Report r = run_suite(cfg, selection);
      emit(r, format, out);
      return r.pass() ? 0 : 1;
    }
    if (*report) {
      if (in_path.empty()) {
        const Report r = run_suite(cfg, check_names());
        emit(r, format, "");
        return r.pass() ? 0 : 1;
      }
      const Json j = read_json_file(in_path);
      if (format == "json") {
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "stringtop " << j.value("version", "?") << "\n";
        for (const auto &c : j.at("checks"))
          std::cout << "  " << c.at("check").get<std::string>() << "  "
                    << (c.at("pass").get<bool>() ? "pass" : "FAIL") << "  "
                    << c.at("max_residual").dump() << " / "
                    << c.at("tolerance").dump() << "\n";
        std::cout << (j.at("pass").get<bool>() ? "all checks passed"
                                               : "some checks FAILED")
                  << "\n";
      }
      return j.at("pass").get<bool>() ? 0 : 1;
    }
    if (*torus)
      return demo_torus(classes, demo_n, cfg.seed, cfg.plan);
    if (*perturb) {
      const PLLoop loop = loop_from_json(read_json_file(loopfile));
      std::cout << to_json(perturb_loop(loop, cfg.seed)).dump(2) << "\n";
      return 0;
    }
    if (*bracket) {
      const PLLoop a = loop_from_json(read_json_file(loop_a));
      const PLLoop b = loop_from_json(read_json_file(loop_b));
      const StringCycle br =
          string_bracket(StringCycle::single(a), StringCycle::single(b));
      std::cout << to_json(br).dump(2) << "\n";
      return 0;
    }
  } catch (const TransversalityError &e) {
    std::cerr << "error: " << e.what() << " (segments " << e.segment() << ", "
              << e.other_segment() << "); try `stringtop perturb`\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
