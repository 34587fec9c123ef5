// ait: command-line front end for tables, learners, deceivers and checks.
//
// Exit status: 0 success or pass, 1 failed verdict or broken contract,
// 2 usage or input error, 3 search or resource budget exhausted.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ait/ait.hpp"

namespace {

using namespace ait;

struct TableArgs {
  std::string table_path;
  unsigned max_len = 24;
  std::uint64_t max_steps = 256;
  Natural value_cap = kDefaultValueCap;
  Natural condition = 0;

  Limits limits() const {
    Limits l{max_len, max_steps, value_cap};
    l.validate();
    return l;
  }
};

struct TheoryArgs {
  std::string epsilon = "0";
  Natural budget = 1000;
  std::string loss = "mse";
  std::string lambda = "0";

  FormalTheory theory() const {
    FormalTheory t;
    t.epsilon = parse_rational(epsilon);
    t.model_budget = budget;
    t.loss = parse_loss(loss);
    t.lambda = parse_rational(lambda);
    t.validate();
    return t;
  }
};

struct Globals {
  unsigned jobs = 1;
  std::string out;
};

void add_limit_options(CLI::App* cmd, TableArgs& a, bool allow_table = true) {
  if (allow_table) cmd->add_option("--table", a.table_path, "Load an ait-table/1 file instead of enumerating");
  cmd->add_option("--max-len", a.max_len, "Program length bound L in bits")->capture_default_str();
  cmd->add_option("--max-steps", a.max_steps, "Step bound T")->capture_default_str();
  cmd->add_option("--value-cap", a.value_cap, "Value bound V_max")->capture_default_str();
}

void add_theory_options(CLI::App* cmd, TheoryArgs& t) {
  cmd->add_option("--epsilon", t.epsilon, "Optimality threshold, exact rational p/q")->capture_default_str();
  cmd->add_option("--budget", t.budget, "Model codes 0..B are scanned")->capture_default_str();
  cmd->add_option("--loss", t.loss, "mse or jk")->capture_default_str();
  cmd->add_option("--lambda", t.lambda, "Model-complexity weight for jk, p/q")->capture_default_str();
}

Json limits_config(const TableArgs& a) {
  Json j = {{"max_len", a.max_len}, {"max_steps", a.max_steps}, {"value_cap", a.value_cap},
            {"condition", a.condition}};
  if (!a.table_path.empty()) {
    j["table"] = a.table_path;
    j["table_digest"] = io::content_digest(Json::parse(io::read_file(a.table_path)));
  }
  return j;
}

Json theory_config(const TheoryArgs& t) {
  return {{"epsilon", t.epsilon}, {"budget", t.budget}, {"loss", t.loss}, {"lambda", t.lambda}};
}

Json command_config(const std::string& command, Json fields) {
  fields["command"] = command;
  fields["tool_version"] = kToolVersion;
  return fields;
}

std::shared_ptr<const ComplexityTable> obtain_table(const TableArgs& a, TableCache& cache) {
  if (!a.table_path.empty()) {
    auto t = std::make_shared<const ComplexityTable>(load_table(a.table_path));
    cache.put(t);
    return t;
  }
  return cache.get(a.limits(), a.condition);
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    io::write_atomic(path, content);
}

int verdict_exit(const Verdict& v, const std::string& out, const Json& config) {
  std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.details << "\n";
  std::cout << v.measured.dump() << "\n";
  if (!out.empty()) io::write_atomic(out, verdict_report(v, config).dump(1) + "\n");
  return v.pass ? 0 : 1;
}

std::string dataset_text(const Dataset& d) { return csv::format_dataset(d); }

int run_cli(int argc, char** argv) {
  CLI::App app{"Bounded algorithmic-information laboratory on the PM1 prefix machine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Globals g;
  app.add_option("--jobs", g.jobs, "Worker threads for enumeration")->capture_default_str();

  int status = 0;
  auto cache_for = [&] { return std::make_shared<TableCache>(BuildOptions{std::max(1u, g.jobs)}); };

  // enumerate ---------------------------------------------------------------
  TableArgs en;
  bool keep_programs = false;
  std::string en_out;
  auto* enumerate = app.add_subcommand("enumerate", "Build a complexity table");
  add_limit_options(enumerate, en, false);
  enumerate->add_option("--condition", en.condition, "Conditional input c")->capture_default_str();
  enumerate->add_flag("--keep-programs", keep_programs, "Store every halting program");
  enumerate->add_option("--out", en_out, "Output table file")->required();
  enumerate->callback([&] {
    BuildOptions opts{std::max(1u, g.jobs)};
    opts.keep_programs = keep_programs;
    ComplexityTable t = build_table(en.limits(), en.condition, opts);
    kraft_check(t);
    save_table(t, en_out);
    std::cout << "entries " << t.entries.size() << "\nkraft " << t.kraft.to_string() << "\ntail "
              << t.tail_mass.to_string() << "\n";
  });

  // query -------------------------------------------------------------------
  TableArgs qa;
  std::string q_what;
  Natural q_value = 0;
  auto* query_cmd = app.add_subcommand("query", "Look up K_t, m_t or the shortest program of a value");
  query_cmd->add_option("what", q_what, "k | m | shortest")->required()->check(CLI::IsMember({"k", "m", "shortest"}));
  query_cmd->add_option("value", q_value, "Value to look up")->required();
  add_limit_options(query_cmd, qa);
  query_cmd->add_option("--condition", qa.condition, "Conditional input c")->capture_default_str();
  query_cmd->callback([&] {
    auto cache = cache_for();
    auto t = obtain_table(qa, *cache);
    auto r = query(*t, q_value);
    if (!r) throw NotFound("value " + std::to_string(q_value) + " is absent from the table");
    if (q_what == "k") std::cout << r->k << "\n";
    if (q_what == "m") std::cout << r->m.to_string() << "\n";
    if (q_what == "shortest") std::cout << r->shortest.to_string() << "\n";
  });

  // bb ----------------------------------------------------------------------
  TableArgs ba;
  unsigned bb_n = 0;
  auto* bb_cmd = app.add_subcommand("bb", "Busy-beaver value 1 + max output of programs of length <= n");
  bb_cmd->add_option("n", bb_n, "Length bound in bits")->required();
  add_limit_options(bb_cmd, ba);
  bb_cmd->callback([&] {
    auto cache = cache_for();
    std::cout << bb(*obtain_table(ba, *cache), bb_n) << "\n";
  });

  // omega -------------------------------------------------------------------
  TableArgs oa;
  unsigned omega_n = 0;
  auto* omega_cmd = app.add_subcommand("omega", "Leading digits of the bounded halting probability");
  omega_cmd->add_option("n", omega_n, "Number of binary digits")->required();
  add_limit_options(omega_cmd, oa);
  omega_cmd->callback([&] {
    auto cache = cache_for();
    OmegaDigits d = omega_bits(*obtain_table(oa, *cache), omega_n);
    std::cout << "bits " << (d.bits.empty() ? "-" : d.bits) << "\ncertified " << d.certified << "\n";
  });

  // sample ------------------------------------------------------------------
  auto* sample = app.add_subcommand("sample", "Draw from a data source");
  sample->require_subcommand(1);
  TableArgs sa;
  std::uint64_t seed = 0, count = 1, max_attempts = 1'000'000;
  std::string s_out;
  auto* s_univ = sample->add_subcommand("universal", "Datasets from random program bits");
  add_limit_options(s_univ, sa, false);
  s_univ->add_option("--seed", seed)->capture_default_str();
  s_univ->add_option("--count", count, "Number of accepted samples")->capture_default_str();
  s_univ->add_option("--max-attempts", max_attempts)->capture_default_str();
  s_univ->add_option("--out", s_out, "Dataset file (count 1) or sample series (count > 1)");
  s_univ->callback([&] {
    SeededBitStream stream(seed);
    if (count == 1) {
      UniversalSample s = sample_universal(sa.limits(), stream, max_attempts);
      emit(s_out, dataset_text(s.dataset));
      Json meta = {{"seed", seed}, {"rng", kRngAlgorithm}, {"attempts", s.attempts},
                   {"program_bits", s.program.to_string()}, {"code", s.code},
                   {"config", command_config("sample universal", limits_config(sa))}};
      if (!s_out.empty() && s_out != "-") io::write_atomic(s_out + ".meta.json", meta.dump(1) + "\n");
      else std::cerr << meta.dump() << "\n";
      return;
    }
    emit(s_out, universal_series_csv(sa.limits(), stream, count, max_attempts));
  });
  std::size_t iid_n = 0;
  std::string iid_p = "1/2";
  auto* s_iid = sample->add_subcommand("iid", "Independent Bernoulli flips");
  s_iid->add_option("--n", iid_n, "Number of flips")->required();
  s_iid->add_option("--p", iid_p, "Success probability p/q")->capture_default_str();
  s_iid->add_option("--seed", seed)->capture_default_str();
  s_iid->add_option("--out", s_out);
  s_iid->callback([&] {
    SeededBitStream stream(seed);
    std::string line;
    for (auto f : sample_iid_bernoulli(iid_n, parse_rational(iid_p), stream)) line.push_back(f ? '1' : '0');
    emit(s_out, line + "\n");
  });

  // learn -------------------------------------------------------------------
  TheoryArgs la;
  TableArgs lt;
  std::string l_data;
  auto* learn_cmd = app.add_subcommand("learn", "Run the MDL-first learner on a dataset");
  learn_cmd->add_option("--data", l_data, "Dataset file")->required();
  add_theory_options(learn_cmd, la);
  add_limit_options(learn_cmd, lt, false);
  learn_cmd->callback([&] {
    auto cache = cache_for();
    LearningOutcome o = learn(replay(l_data), la.theory(), provider_for(*cache, lt.limits()));
    std::cout << "code " << o.model.code << "\nmodel " << to_string(o.model) << "\nflag " << o.flag
              << "\nz " << format_rational(o.z) << "\n";
  });

  // deceive -----------------------------------------------------------------
  auto* deceive = app.add_subcommand("deceive", "Deceiving-dataset constructions");
  deceive->require_subcommand(1);
  TheoryArgs da;
  TableArgs dt;
  unsigned d_n = 0, d_m = 0, d_C = kDefaultUnpredictabilityC;
  std::string d_mode = "bb-rank", d_data, d_out;

  auto* d_avail = deceive->add_subcommand("available", "First available dataset meeting the size and model bounds");
  d_avail->add_option("--n", d_n, "Model complexity bound in bits")->required();
  add_theory_options(d_avail, da);
  add_limit_options(d_avail, dt);
  d_avail->add_option("--out", d_out);
  d_avail->callback([&] {
    auto cache = cache_for();
    auto t = obtain_table(dt, *cache);
    AvailableResult r = construct_available(da.theory(), d_n, *t, provider_for(*cache, t->limits));
    emit(d_out, dataset_text(r.d_a));
    std::cerr << "bb(n) " << r.bb_n << ", model " << to_string(r.outcome.model) << " (code "
              << r.outcome.model.code << "), examined " << r.candidates_examined << "\n";
  });

  auto* d_ext = deceive->add_subcommand("extend", "Extend an available dataset into a deceiver");
  d_ext->add_option("--data", d_data, "Available dataset file")->required();
  d_ext->add_option("--m", d_m, "Rank parameter in bits")->required();
  d_ext->add_option("--mode", d_mode, "bb-rank or first")->capture_default_str();
  add_theory_options(d_ext, da);
  add_limit_options(d_ext, dt);
  d_ext->add_option("--out", d_out);
  d_ext->callback([&] {
    auto cache = cache_for();
    auto t = obtain_table(dt, *cache);
    ExtensionResult r = extend_to_deceiver(da.theory(), replay(d_data), d_m, *t, parse_mode(d_mode),
                                           provider_for(*cache, t->limits));
    emit(d_out, dataset_text(r.d_total));
    std::cerr << "model " << to_string(r.model_total) << " (code " << r.model_total.code << "), rank "
              << r.rank << "\n";
  });

  auto* d_full = deceive->add_subcommand("full", "Complete construction with all measured constants");
  d_full->add_option("--n", d_n)->required();
  d_full->add_option("--m", d_m)->required();
  d_full->add_option("--mode", d_mode, "bb-rank or first")->capture_default_str();
  d_full->add_option("--C", d_C, "Unpredictability constant in bits")->capture_default_str();
  add_theory_options(d_full, da);
  add_limit_options(d_full, dt, false);
  d_full->add_option("--out", d_out, "Report file");
  d_full->callback([&] {
    auto cache = cache_for();
    DeceptionReport r = construct_full(da.theory(), d_n, d_m, dt.limits(), *cache, parse_mode(d_mode), d_C);
    Json config = limits_config(dt);
    config.update(theory_config(da));
    config.update(Json{{"n", d_n}, {"m", d_m}, {"mode", d_mode}, {"C", d_C}});
    Json doc = report_to_json(r, command_config("deceive full", config));
    emit(d_out, doc.dump(1) + "\n");
    for (const auto& [name, ok] : r.verdicts) std::cerr << (ok ? "PASS " : "FAIL ") << name << "\n";
    status = r.all_pass() ? 0 : 1;
  });

  auto* d_bubble = deceive->add_subcommand("bubble", "Search for a simplicity-bubble witness");
  d_bubble->add_option("--data", d_data, "Available dataset file")->required();
  d_bubble->add_option("--C", d_C, "Unpredictability constant in bits")->capture_default_str();
  add_theory_options(d_bubble, da);
  add_limit_options(d_bubble, dt, false);
  d_bubble->callback([&] {
    auto cache = cache_for();
    BubbleResult b = detect_bubble(da.theory(), replay(d_data), dt.limits(), d_C, *cache);
    if (!b.bubble) {
      std::cout << "no witness within limits (" << b.candidates_examined << " outputs examined)\n";
      return;
    }
    std::cout << "bubble\nmodel " << to_string(b.model_total) << "\ngap " << b.gap.gap << "\n"
              << dataset_text(b.d_total);
  });

  // cage --------------------------------------------------------------------
  TheoryArgs ca;
  TableArgs ct;
  std::string c_data;
  unsigned slack = 0;
  auto* cage = app.add_subcommand("cage", "Complexity-caging gate");
  cage->add_option("--data", c_data, "Dataset file")->required();
  cage->add_option("--slack", slack, "Slack c in bits")->required();
  add_theory_options(cage, ca);
  add_limit_options(cage, ct);
  cage->callback([&] {
    auto cache = cache_for();
    auto t = obtain_table(ct, *cache);
    CageDecision d = cage_gate(replay(c_data), ca.theory(), slack, *t, provider_for(*cache, t->limits));
    std::cout << (d.accept ? "accept" : "reject") << ": " << d.reason << " (threshold " << d.threshold
              << ")\n";
  });

  // verify ------------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Theorem and lemma checks");
  verify->require_subcommand(1);
  TableArgs va;
  std::string v_out, v_report;
  unsigned n_max = 0;
  std::size_t thm2_k = 0, samples = 100, trials = 10'000;
  std::vector<std::size_t> sizes{8, 64, 512};
  std::string v_epsilon = "1/100", series_out;
  TheoryArgs vt;

  auto* v_l1 = verify->add_subcommand("lemma1", "Busy-beaver bounds");
  add_limit_options(v_l1, va);
  v_l1->add_option("--n-max", n_max)->required();
  v_l1->add_option("--out", v_out);
  v_l1->callback([&] {
    auto cache = cache_for();
    Json config = limits_config(va);
    config["n_max"] = n_max;
    status = verdict_exit(check_lemma1(*obtain_table(va, *cache), n_max), v_out,
                          command_config("verify lemma1", config));
  });

  auto* v_coding = verify->add_subcommand("coding", "Coding-theorem direction and gap");
  add_limit_options(v_coding, va);
  v_coding->add_option("--out", v_out);
  v_coding->callback([&] {
    auto cache = cache_for();
    status = verdict_exit(check_coding(*obtain_table(va, *cache)), v_out,
                          command_config("verify coding", limits_config(va)));
  });

  auto* v_t1 = verify->add_subcommand("thm1", "Independent re-check of a deception report");
  v_t1->add_option("--report", v_report)->required();
  v_t1->add_option("--out", v_out);
  v_t1->callback([&] {
    auto cache = cache_for();
    DeceptionReport r = load_report(v_report);
    status = verdict_exit(check_theorem1(r, *cache), v_out,
                          command_config("verify thm1", {{"report", v_report}}));
  });

  auto* v_t2 = verify->add_subcommand("thm2", "Probability dominance exponent c*");
  v_t2->add_option("--report", v_report)->required();
  v_t2->add_option("--k", thm2_k, "Minimum dataset size (default: the report's bb(n))");
  v_t2->add_option("--max-steps", va.max_steps, "Step bound of the table to scan (default: the report's)");
  v_t2->add_option("--out", v_out);
  v_t2->callback([&] {
    auto cache = cache_for();
    DeceptionReport r = load_report(v_report);
    Limits l = r.table_limits;
    if (v_t2->count("--max-steps")) l.max_steps = va.max_steps;
    std::size_t k = v_t2->count("--k") ? thm2_k : static_cast<std::size_t>(r.bb_n);
    status = verdict_exit(check_theorem2(r, *cache->get(l, 0), k), v_out,
                          command_config("verify thm2", {{"report", v_report}, {"k", k}, {"max_steps", l.max_steps}}));
  });

  auto* v_ax = verify->add_subcommand("axioms", "Non-triviality and extensibility");
  v_ax->add_option("--samples", samples)->capture_default_str();
  v_ax->add_option("--seed", seed)->capture_default_str();
  add_theory_options(v_ax, vt);
  v_ax->add_option("--out", v_out);
  v_ax->callback([&] {
    SeededBitStream stream(seed);
    Json config = theory_config(vt);
    config.update(Json{{"samples", samples}, {"seed", seed}});
    status = verdict_exit(check_axioms(vt.theory(), samples, stream), v_out,
                          command_config("verify axioms", config));
  });

  auto* v_iid = verify->add_subcommand("iid-contrast", "Deceiver frequency under an i.i.d. source");
  v_iid->add_option("--sizes", sizes)->capture_default_str();
  v_iid->add_option("--trials", trials)->capture_default_str();
  v_iid->add_option("--epsilon", v_epsilon)->capture_default_str();
  v_iid->add_option("--seed", seed)->capture_default_str();
  std::string estimator = "kt";
  v_iid->add_option("--estimator", estimator, "Frequency estimator: kt or laplace")->capture_default_str();
  v_iid->add_option("--series-out", series_out, "Decay series file");
  v_iid->add_option("--out", v_out);
  v_iid->callback([&] {
    IidContrast c = iid_contrast(sizes, trials, parse_rational(v_epsilon), SeededBitStream(seed),
                                 Rational(1, 2), parse_estimator(estimator));
    if (!series_out.empty()) io::write_atomic(series_out, decay_csv(c.series));
    std::cout << decay_csv(c.series);
    status = verdict_exit(c.verdict, v_out,
                          command_config("verify iid-contrast", {{"sizes", sizes}, {"trials", trials},
                                                                 {"epsilon", v_epsilon}, {"seed", seed},
                                                                 {"estimator", estimator}}));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ait::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
