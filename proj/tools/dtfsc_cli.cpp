// Command-line front end: gen-bench, synth, to-dtfsc, skipify, verify,
// simulate, report, export-dot.
//
// Exit codes: 0 success, 1 verification counterexample or failed synthesis,
// 2 usage, schema or model errors.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dtfsc/bench.hpp"
#include "dtfsc/dot.hpp"
#include "dtfsc/dtfsc.hpp"
#include "dtfsc/error.hpp"
#include "dtfsc/io.hpp"
#include "dtfsc/report.hpp"
#include "dtfsc/skip.hpp"
#include "dtfsc/synth.hpp"

namespace {

using namespace dtfsc;

constexpr int kOk = 0;
constexpr int kCounterexample = 1;
constexpr int kUsage = 2;

/// Thrown by subcommands that found a counterexample; the message is the report.
struct Counterexample {
  std::string report;
};

/// Writes `text` to `out`, else to $DTFSC_OUT_DIR/<default_name>, else stdout.
void emit(const std::string& text, const std::string& out, const std::string& default_name) {
  std::string path = out;
  if (path.empty()) {
    if (const char* dir = std::getenv("DTFSC_OUT_DIR"); dir && *dir && !default_name.empty()) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / default_name).string();
    }
  }
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_text_file(path, text);
  std::cerr << "wrote " << path << "\n";
}

std::string stem(const std::string& path) {
  std::string s = std::filesystem::path(path).filename().string();
  if (auto dot = s.find('.'); dot != std::string::npos) s.erase(dot);
  return s;
}

Pomdp load_model(const std::string& path) {
  std::vector<std::string> warnings;
  Pomdp m = parse_pomdp(read_text_file(path), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
  return m;
}

Impurity parse_impurity(const std::string& s) {
  return s == "gini" ? Impurity::gini : Impurity::entropy;
}

struct Options {
  std::string out;
  std::uint64_t seed = 1;
  std::size_t horizon = kDefaultHorizon;
  std::string impurity = "entropy";
  unsigned jobs = 1;
};

BuildOptions build_options(const Options& o) {
  BuildOptions b;
  b.learn.impurity = parse_impurity(o.impurity);
  b.jobs = o.jobs;
  return b;
}

void print_verdict(const char* what, bool ok, const std::string& detail = {}) {
  std::cout << what << ": " << (ok ? "ok" : "FAILED") << "\n";
  if (!ok && !detail.empty()) std::cout << detail << (detail.back() == '\n' ? "" : "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POMDP controllers as decision trees"};
  app.require_subcommand(1);
  Options opt;
  auto add_out = [&](CLI::App* sc) { sc->add_option("--out", opt.out, "output path ('-' for stdout)"); };
  auto add_learn = [&](CLI::App* sc) {
    sc->add_option("--impurity", opt.impurity, "split criterion")->check(CLI::IsMember({"entropy", "gini"}));
    sc->add_option("--jobs", opt.jobs, "threads for per-node tree learning")->check(CLI::PositiveNumber);
  };

  // gen-bench
  std::string bench;
  auto* gen = app.add_subcommand("gen-bench", "write a bundled benchmark model");
  gen->add_option("name", bench, "maze, line, obstacle-<n> or refuel-<n>-<e>");
  add_out(gen);
  bool list = false;
  gen->add_flag("--list", list, "print the bundled benchmark names instead");

  // synth
  std::string model_path, ctrl_path, index_path, dt_path, index_out;
  auto* synth = app.add_subcommand("synth", "synthesize a winning controller and its iteration index");
  synth->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  add_out(synth);
  synth->add_option("--index-out", index_out, "where to write the iteration index");

  // to-dtfsc
  auto* todt = app.add_subcommand("to-dtfsc", "learn the decision-tree form of a controller");
  todt->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  todt->add_option("controller", ctrl_path, "FSC or skip-FSC")->required()->check(CLI::ExistingFile);
  add_out(todt);
  add_learn(todt);

  // skipify
  auto* skipify = app.add_subcommand("skipify", "convert an FSC into a skip-FSC");
  skipify->add_option("fsc", ctrl_path)->required()->check(CLI::ExistingFile);
  skipify->add_option("index", index_path)->required()->check(CLI::ExistingFile);
  add_out(skipify);

  // verify
  auto* verify = app.add_subcommand("verify", "winning, chain property, equivalence and faithfulness checks");
  verify->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  verify->add_option("fsc", ctrl_path)->required()->check(CLI::ExistingFile);
  verify->add_option("index", index_path, "iteration index; enables the skip checks")->check(CLI::ExistingFile);
  verify->add_option("--dtfsc", dt_path, "also check this DT-FSC file")->check(CLI::ExistingFile);
  add_learn(verify);

  // simulate
  std::size_t episodes = 1;
  auto* sim = app.add_subcommand("simulate", "run episodes of a controller");
  sim->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  sim->add_option("controller", ctrl_path, "FSC, skip-FSC or DT-FSC")->required()->check(CLI::ExistingFile);
  sim->add_option("--seed", opt.seed, "random seed");
  sim->add_option("--horizon", opt.horizon, "step cap per episode")->check(CLI::NonNegativeNumber);
  sim->add_option("--episodes", episodes, "number of episodes")->check(CLI::PositiveNumber);
  add_out(sim);

  // report
  std::string name;
  auto* rep = app.add_subcommand("report", "size metrics of an FSC and its DT forms as CSV");
  rep->add_option("model", model_path)->required()->check(CLI::ExistingFile);
  rep->add_option("fsc", ctrl_path)->required()->check(CLI::ExistingFile);
  rep->add_option("index", index_path, "iteration index; adds the skip row")->check(CLI::ExistingFile);
  rep->add_option("--name", name, "benchmark column (default: model file stem)");
  add_out(rep);
  add_learn(rep);

  // export-dot
  std::optional<NodeId> tree_node;
  std::string tree_kind = "action";
  auto* dot = app.add_subcommand("export-dot", "Graphviz rendering of a controller or one of its trees");
  dot->add_option("file", ctrl_path, "FSC, skip-FSC or DT-FSC")->required()->check(CLI::ExistingFile);
  dot->add_option("--node", tree_node, "DT-FSC only: render a single tree of this node");
  dot->add_option("--tree", tree_kind, "action or transition")->check(CLI::IsMember({"action", "transition"}));
  add_out(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (gen->parsed()) {
      if (list) {
        for (const auto& b : bundled_benchmarks()) std::cout << b << "\n";
        return kOk;
      }
      if (bench.empty()) {
        std::cerr << "gen-bench: a benchmark name or --list is required\n";
        return kUsage;
      }
      emit(dump_pomdp(make_benchmark(bench)), opt.out, bench + ".pomdp.json");
    } else if (synth->parsed()) {
      const Pomdp m = load_model(model_path);
      const auto r = synthesize(m);
      std::cerr << "synthesized " << r.fsc.num_nodes << " nodes after " << r.iterations << " iterations\n";
      const std::string base = stem(model_path);
      emit(dump_fsc(r.fsc), opt.out, base + ".fsc.json");
      std::string idx_out = index_out;
      if (idx_out.empty() && !opt.out.empty() && opt.out != "-") {
        idx_out = opt.out;
        if (idx_out.size() > 5 && idx_out.ends_with(".json")) idx_out.resize(idx_out.size() - 5);
        idx_out += ".index.json";
      }
      if (idx_out.empty() && std::getenv("DTFSC_OUT_DIR") == nullptr)
        std::cerr << "note: iteration index not written; pass --index-out or --out\n";
      else
        emit(dump_index(r.index), idx_out, base + ".index.json");
    } else if (todt->parsed()) {
      const Pomdp m = load_model(model_path);
      const std::string text = read_text_file(ctrl_path);
      const auto kind = document_kind(text);
      DtFsc dt;
      if (kind == DocumentKind::fsc) dt = build_dtfsc(parse_fsc(text), m, build_options(opt));
      else if (kind == DocumentKind::skip_fsc) dt = build_dtfsc(parse_skip_fsc(text), m, build_options(opt));
      else throw SchemaError("/kind", "expected an fsc or skip-fsc document");
      emit(dump_dtfsc(dt), opt.out, stem(ctrl_path) + (kind == DocumentKind::fsc ? ".dtfsc.json" : ".skip-dtfsc.json"));
    } else if (skipify->parsed()) {
      const Fsc fsc = parse_fsc(read_text_file(ctrl_path));
      const IterationIndex idx = parse_index(read_text_file(index_path));
      emit(dump_skip_fsc(to_skip_fsc(fsc, idx)), opt.out, stem(ctrl_path) + ".skip-fsc.json");
    } else if (verify->parsed()) {
      const Pomdp m = load_model(model_path);
      const Fsc fsc = parse_fsc(read_text_file(ctrl_path));
      validate_against(fsc, m);
      bool ok = true;
      const auto pc = product_chain(fsc, m);
      const bool win = almost_sure_reach(pc.chain, pc.goal, pc.init);
      print_verdict("almost-sure reachability", win, "the target is missed with positive probability");
      ok &= win;
      const auto dt = build_dtfsc(fsc, m, build_options(opt));
      const auto fv = check_faithful(fsc, dt, m);
      print_verdict("DT-FSC faithfulness", fv.equal, fv.to_string());
      ok &= fv.equal;
      if (!index_path.empty()) {
        const IterationIndex idx = parse_index(read_text_file(index_path));
        const auto witness = find_chain_violation(fsc, idx);
        std::string detail;
        if (witness)
          detail = "node " + std::to_string(witness->node) + ", observation (" + witness->from.to_string() +
                   ") -> (" + witness->won.to_string() + "): " +
                   (witness->found ? "goes to n" + std::to_string(*witness->found) : "undefined");
        print_verdict("chain property", !witness, detail);
        ok &= !witness;
        if (!witness) {
          const SkipFsc sf = to_skip_fsc(fsc, idx);
          const auto ev = check_equiv(fsc, sf, m);
          print_verdict("skip-FSC equivalence", ev.equivalent, ev.to_string(m));
          ok &= ev.equivalent;
          const auto sdt = build_dtfsc(sf, m, build_options(opt));
          const auto sv = check_faithful(sf, sdt, m);
          print_verdict("skip-DT-FSC faithfulness", sv.equal, sv.to_string());
          ok &= sv.equal;
        }
      }
      if (!dt_path.empty()) {
        const DtFsc given = parse_dtfsc(read_text_file(dt_path));
        FaithfulVerdict v;
        if (given.variant == DtFsc::Variant::plain) {
          v = check_faithful(fsc, given, m);
        } else {
          if (index_path.empty()) throw SchemaError("/variant", "a skip DT-FSC needs the iteration index");
          v = check_faithful(to_skip_fsc(fsc, parse_index(read_text_file(index_path))), given, m);
        }
        print_verdict("given DT-FSC faithfulness", v.equal, v.to_string());
        ok &= v.equal;
      }
      return ok ? kOk : kCounterexample;
    } else if (sim->parsed()) {
      const Pomdp m = load_model(model_path);
      const std::string text = read_text_file(ctrl_path);
      const auto kind = document_kind(text);
      Rng rng(opt.seed);
      std::optional<Fsc> fsc;
      std::optional<SkipFsc> sf;
      std::optional<DtFsc> dt;
      if (kind == DocumentKind::fsc) fsc = parse_fsc(text);
      else if (kind == DocumentKind::skip_fsc) sf = parse_skip_fsc(text);
      else if (kind == DocumentKind::dtfsc) dt = parse_dtfsc(text);
      else throw SchemaError("/kind", "expected a controller document");
      std::string out;
      std::size_t hits = 0;
      for (std::size_t e = 0; e < episodes; ++e) {
        EpisodeResult r = fsc ? simulate_episode(*fsc, m, rng, opt.horizon)
                          : sf ? simulate_episode(*sf, m, rng, opt.horizon)
                               : simulate_episode(*dt, m, rng, opt.horizon);
        hits += r.status == EpisodeStatus::target;
        out += "episode " + std::to_string(e) + " " + to_string(r.status) + " " + std::to_string(r.steps) + "\n";
      }
      out += "target " + std::to_string(hits) + "/" + std::to_string(episodes) + "\n";
      emit(out, opt.out, "");
    } else if (rep->parsed()) {
      const Pomdp m = load_model(model_path);
      const Fsc fsc = parse_fsc(read_text_file(ctrl_path));
      const std::string bench_name = name.empty() ? stem(model_path) : name;
      const auto dt = build_dtfsc(fsc, m, build_options(opt));
      if (auto v = check_faithful(fsc, dt, m); !v.equal) throw Counterexample{v.to_string()};
      std::string csv = csv_header() + "\n" + csv_row(make_report(bench_name, fsc, dt, m)) + "\n";
      if (!index_path.empty()) {
        const SkipFsc sf = to_skip_fsc(fsc, parse_index(read_text_file(index_path)));
        const auto sdt = build_dtfsc(sf, m, build_options(opt));
        if (auto v = check_faithful(sf, sdt, m); !v.equal) throw Counterexample{v.to_string()};
        csv += csv_row(make_report(bench_name, fsc, sdt, m)) + "\n";
      }
      emit(csv, opt.out, bench_name + ".csv");
    } else if (dot->parsed()) {
      const std::string text = read_text_file(ctrl_path);
      const auto kind = document_kind(text);
      std::string out;
      if (kind == DocumentKind::fsc) {
        out = controller_dot(parse_fsc(text));
      } else if (kind == DocumentKind::skip_fsc) {
        out = controller_dot(parse_skip_fsc(text));
      } else if (kind == DocumentKind::dtfsc) {
        const DtFsc d = parse_dtfsc(text);
        if (tree_node) {
          const auto* nt = d.find(*tree_node);
          if (!nt) throw SchemaError("/trees", "no trees for node " + std::to_string(*tree_node));
          if (tree_kind == "action") {
            std::vector<std::string> labels;
            for (std::uint32_t l = 0; l < d.action_labels.size(); ++l) labels.push_back(d.label_name(l));
            out = tree_dot(nt->action_tree, d.features, labels, "A" + std::to_string(*tree_node));
          } else {
            std::vector<std::string> labels;
            for (std::size_t n = 0; n < d.num_nodes; ++n) labels.push_back("n" + std::to_string(n));
            out = tree_dot(nt->transition_tree, transition_layout(d.features), labels,
                           "T" + std::to_string(*tree_node));
          }
        } else {
          out = dtfsc_dot(d);
        }
      } else {
        throw SchemaError("/kind", "expected a controller document");
      }
      emit(out, opt.out, stem(ctrl_path) + ".dot");
    }
    return kOk;
  } catch (const Counterexample& c) {
    std::cout << c.report << "\n";
    return kCounterexample;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kUsage;
  } catch (const ModelError& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCounterexample;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
