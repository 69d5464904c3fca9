// Command line front end: normal forms, the word-problem decision, outlines
// and roots, evaluation in finite semigroups, trace checking and self tests.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kterm/decide.hpp"
#include "kterm/random_terms.hpp"

using namespace kterm;

namespace {

Assignment parse_assignment(const std::string& text) {
  Assignment a;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos || eq != 1)
      throw parse_error("assignment entries look like a=0");
    a[part[0]] = static_cast<unsigned>(std::stoul(part.substr(eq + 1)));
  }
  return a;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw parse_error("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"word problem for terms with (w+q)-powers over local groups"};
  app.require_subcommand(1);

  std::string term_text, lhs_text, eq_text, rhs_text, sg_path, assign_text;
  std::string trace_path, stage = "full", method = "canon";
  bool want_trace = false, porcelain = false, oracle = false, verify = false;
  long long qopt = 0;
  int n_tests = 200;
  std::uint64_t seed = 1;

  auto* canon = app.add_subcommand("canon", "print the normal form of a term");
  canon->add_option("term", term_text)->required();
  canon->add_option("--stage", stage)->check(CLI::IsMember({"semi", "full"}));
  canon->add_flag("--trace", want_trace, "print the derivation after ---");

  auto* dec = app.add_subcommand("decide", "decide lhs = rhs over local groups");
  dec->add_option("lhs", lhs_text)->required();
  dec->add_option("eq", eq_text)->required();
  dec->add_option("rhs", rhs_text)->required();
  dec->add_option("--method", method)
      ->check(CLI::IsMember({"canon", "root", "both"}));
  dec->add_flag("--oracle", oracle, "verify the verdict on the battery");
  dec->add_option("--seed", seed);
  dec->add_flag("--porcelain", porcelain, "machine readable output");

  auto* outl = app.add_subcommand("outline", "print the outline of a term");
  outl->add_option("term", term_text)->required();
  outl->add_option("--q", qopt, "instantiate the parameter");

  auto* root = app.add_subcommand("root", "print the reduced outline");
  root->add_option("term", term_text)->required();
  root->add_option("--q", qopt, "instantiate the parameter");

  auto* ev = app.add_subcommand("eval", "evaluate a term in a semigroup");
  ev->add_option("term", term_text)->required();
  ev->add_option("--sg", sg_path)->required();
  ev->add_option("--assign", assign_text)->required();

  auto* chk = app.add_subcommand("check-sg", "inspect a semigroup table");
  chk->add_option("file", sg_path)->required();

  auto* tr = app.add_subcommand("trace", "replay a derivation trace");
  tr->add_option("file", trace_path)->required();
  tr->add_flag("--verify", verify);

  auto* st = app.add_subcommand("selftest", "random cross-checks");
  st->add_option("--n", n_tests);
  st->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (canon->parsed()) {
      TermPtr t = parse(term_text);
      if (stage == "semi") {
        TermPtr r = reduce_to_rank_le2(t);
        if (rank(r) == 2) r = semicanonicalize_rank2(r);
        std::cout << print(r) << "\n";
        return 0;
      }
      CanonReport rep = canonicalize_LG(t);
      std::cout << print(rep.output) << "\n";
      if (want_trace) {
        std::cout << "---\n" << derivation_to_text(rep.derivation);
      }
      return 0;
    }
    if (dec->parsed()) {
      if (eq_text != "=")
        throw parse_error("usage: kterm decide <lhs> = <rhs>");
      DecideMethod m = method == "canon"   ? DecideMethod::canon
                       : method == "root" ? DecideMethod::root
                                          : DecideMethod::both;
      Verdict v = decide(parse(lhs_text), parse(rhs_text), m, seed);
      if (oracle && v.equal && !battery_equal(parse(lhs_text), parse(rhs_text),
                                              seed))
        throw internal_error("battery separated an equal pair");
      auto root_text = [&](const std::optional<OutlineWord>& w,
                           const TermPtr& c) {
        return w ? outline_to_text(*w) : print(c);
      };
      if (porcelain) {
        std::cout << (v.equal ? "EQUAL" : "UNEQUAL") << "\n";
        std::cout << print(v.lhs_report.output) << "\n";
        std::cout << print(v.rhs_report.output) << "\n";
        std::cout << root_text(v.lhs_root, v.lhs_report.output) << "\n";
        std::cout << root_text(v.rhs_root, v.rhs_report.output) << "\n";
      } else {
        std::cout << (v.equal ? "equal over local groups"
                              : "not equal over local groups")
                  << "\n";
        std::cout << "  lhs normal form: " << print(v.lhs_report.output)
                  << "\n";
        std::cout << "  rhs normal form: " << print(v.rhs_report.output)
                  << "\n";
        if (v.witness) {
          std::cout << "  witness: " << v.witness->semigroup << " with";
          for (auto& [c, e] : v.witness->assignment)
            std::cout << " " << c << "=" << e;
          std::cout << "\n";
        } else if (!v.equal) {
          std::cout << "  unequal by normal forms; no small witness found\n";
        }
      }
      return v.equal ? 0 : 1;
    }
    if (outl->parsed() || root->parsed()) {
      TermPtr t = parse(term_text);
      OutlineWord w = outl->parsed() ? outline(t) : q_root(t);
      if (qopt > 0) w = instantiate(w, qopt);
      std::cout << outline_to_text(w) << "\n";
      return 0;
    }
    if (ev->parsed()) {
      FiniteSemigroup s = load_semigroup(sg_path);
      unsigned r = eval(parse(term_text), s, parse_assignment(assign_text));
      std::cout << r << "\n";
      return 0;
    }
    if (chk->parsed()) {
      FiniteSemigroup s = load_semigroup(sg_path);
      std::cout << "order: " << s.size() << "\n";
      std::cout << "idempotents:";
      for (unsigned e : s.idempotents()) std::cout << " " << e;
      std::cout << "\n";
      std::cout << "local group: " << (is_local_group(s) ? "yes" : "no")
                << "\n";
      return 0;
    }
    if (tr->parsed()) {
      Derivation d = derivation_from_text(read_file(trace_path));
      bool ok = verify_derivation(d);
      std::cout << (ok ? "VALID" : "INVALID") << " (" << d.steps.size()
                << " steps)\n";
      return ok ? 0 : 1;
    }
    if (st->parsed()) {
      SelfTestReport rep = self_consistency(n_tests, seed);
      std::cout << "pairs: " << rep.pairs << "\n";
      std::cout << "equal: " << rep.equal_pairs << "\n";
      std::cout << "failures: " << rep.failures << "\n";
      if (rep.failures) std::cout << "first: " << rep.first_failure << "\n";
      return rep.failures ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
