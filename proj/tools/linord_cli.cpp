// Command-line front end. Every command prints one JSON document, except
// realize, which prints index<TAB>code lines. Exit codes: 0 success,
// 1 diagnostics, 2 negative search results.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "linord/linord.hpp"

using namespace linord;
using Json = nlohmann::ordered_json;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

OrderTerm term_of(const std::string& text) {
  auto r = parse_term(text);
  if (auto* d = std::get_if<Diagnostic>(&r)) throw CliError(d->render(text));
  return std::get<OrderTerm>(r);
}

Code code_of(const std::string& text) {
  auto c = parse_code(text);
  if (!c) throw CliError("not a code: " + text);
  return *c;
}

std::uint64_t number_of(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    throw CliError("not a number: " + text);
  }
  if (used != text.size()) throw CliError("not a number: " + text);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

Json codes_json(const std::vector<Code>& cs) {
  Json a = Json::array();
  for (Code c : cs) a.push_back(to_string(c));
  return a;
}

Json classification_json(const Classification& c) {
  return Json{{"scattered", c.scattered},         {"wellOrder", c.well_order},
              {"revWellOrder", c.rev_well_order}, {"hasMin", c.has_min},
              {"hasMax", c.has_max},              {"scatteredInit", c.scattered_init},
              {"scatteredFinal", c.scattered_final},
              {"rankUpper", c.rank_upper ? Json(c.rank_upper->to_string()) : Json(nullptr)}};
}

// Witness ids name a construction and its arguments, separated by ':'.
//   lk:L:K                 realize(L*K) onto realize(L)
//   zeta-seg:H:b0:b1       H a comma list of naturals, b1 a natural or w
//   revord:g:n:d:m:side    (w^g n)* + w^d m onto one summand, side left|right
//   prod:L:m:k:seed        L*m onto L*k through a random m -> k chain epi
//   pieces:seed            a random finite definition-by-pieces instance
//   mash:seed              a random finite family-mash instance
EpiWitness build_witness(const std::string& id) {
  const auto f = split(id, ':');
  const auto want = [&](std::size_t n) {
    if (f.size() != n) throw CliError("witness id '" + id + "' needs " + std::to_string(n - 1) + " fields");
  };
  if (f.empty()) throw CliError("empty witness id");
  const std::string& kind = f[0];
  if (kind == "lk") {
    want(3);
    return lk_onto_l(term_of(f[1]), term_of(f[2]));
  }
  if (kind == "zeta-seg") {
    want(4);
    std::vector<Cnf> h;
    for (const auto& g : split(f[1], ',')) h.push_back(Cnf::finite(number_of(g)));
    const Cnf b1 = f[3] == "w" ? Cnf::omega() : Cnf::finite(number_of(f[3]));
    return zeta_segment_epi(h, Cnf::finite(number_of(f[2])), b1);
  }
  if (kind == "revord") {
    want(6);
    if (f[5] != "left" && f[5] != "right") throw CliError("side must be left or right");
    return revord_plus_ord_epi(Cnf::finite(number_of(f[1])), number_of(f[2]), Cnf::finite(number_of(f[3])),
                               number_of(f[4]), f[5] == "left" ? Side::Left : Side::Right);
  }
  if (kind == "prod") {
    want(5);
    const std::size_t m = number_of(f[2]), k = number_of(f[3]);
    if (k == 0 || k > m) throw CliError("prod needs 1 <= k <= m");
    FuzzGen gen(number_of(f[4]));
    const EpiWitness phi = finite_epi(FinOrder::chain(m), FinOrder::chain(k), gen.epi(m, k));
    return prod_epi(term_of(f[1]), phi);
  }
  if (kind == "pieces") {
    want(2);
    FuzzGen gen(number_of(f[1]));
    const auto [spec, sigma] = pieces_from_finite(gen.pieces());
    std::string why;
    auto w = def_pieces(spec, sigma, &why);
    if (!w) throw CliError("pieces rejected: " + why);
    return *w;
  }
  if (kind == "mash") {
    want(2);
    FuzzGen gen(number_of(f[1]));
    return mash_from_finite(gen.mash());
  }
  throw CliError("unknown witness kind '" + kind + "'");
}

Json witness_json(const std::string& id, const EpiWitness& w, std::size_t sample) {
  Json pairs = Json::array();
  const auto xs = w.source.first(sample);
  for (Code x : xs) pairs.push_back({to_string(x), to_string(w(x))});
  return Json{{"id", id},
              {"source", w.source.name()},
              {"target", w.target.name()},
              {"provenance", w.provenance},
              {"sample", pairs}};
}

Json report_json(const CheckReport& r) {
  Json mono = Json::array();
  for (const auto& [a, b] : r.monotone_violations) mono.push_back({to_string(a), to_string(b)});
  return Json{{"pairsChecked", r.pairs_checked},
              {"monotoneViolations", mono},
              {"rangeViolations", codes_json(r.range_violations)},
              {"targetsCovered", r.targets_covered},
              {"targetsMissed", codes_json(r.targets_missed)},
              {"verdict", to_string(r.verdict)},
              {"note", r.note}};
}

std::string build_id(const std::string& kind, const std::string& left, const std::string& right,
                     const std::string& h, const std::string& from, const std::string& to, std::uint64_t g,
                     std::uint64_t n, std::uint64_t d, std::uint64_t m, const std::string& side, std::uint64_t k,
                     std::uint64_t seed) {
  const auto need = [&](bool ok, const char* what) {
    if (!ok) throw CliError(std::string("--kind ") + kind + " needs " + what);
  };
  if (kind == "lk") {
    need(!left.empty() && !right.empty(), "--left and --right");
    return "lk:" + left + ":" + right;
  }
  if (kind == "zeta-seg") {
    need(!h.empty() && !from.empty() && !to.empty(), "--exponents, --from and --to");
    return "zeta-seg:" + h + ":" + from + ":" + to;
  }
  if (kind == "revord") return "revord:" + std::to_string(g) + ":" + std::to_string(n) + ":" + std::to_string(d) +
                               ":" + std::to_string(m) + ":" + side;
  if (kind == "prod") {
    need(!left.empty(), "--left");
    return "prod:" + left + ":" + std::to_string(m) + ":" + std::to_string(k) + ":" + std::to_string(seed);
  }
  if (kind == "pieces" || kind == "mash") return kind + ":" + std::to_string(seed);
  throw CliError("unknown --kind " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linord: countable linear orders and their surjections"};
  app.require_subcommand(1);
  int exit_code = 0;
  Json out;
  bool lines_mode = false;
  std::string lines;

  std::string expr, expr2, a_text, b_text;

  auto* classify_cmd = app.add_subcommand("classify", "structural properties of a term");
  classify_cmd->add_option("expr", expr)->required();
  classify_cmd->callback([&] { out = classification_json(classify(term_of(expr))); });

  auto* sts_cmd = app.add_subcommand("sts", "strong surjectivity verdict");
  sts_cmd->add_option("expr", expr)->required();
  sts_cmd->callback([&] {
    const Verdict v = sts_verdict(term_of(expr));
    out = Json{{"verdict", to_string(v.outcome)}, {"ruleTrace", v.rule_trace}};
  });

  auto* rank_cmd = app.add_subcommand("rank", "Hausdorff rank upper bound");
  rank_cmd->add_option("expr", expr)->required();
  rank_cmd->callback([&] {
    const Classification c = classify(term_of(expr));
    out = Json{{"scattered", c.scattered},
               {"rankUpper", c.rank_upper ? Json(c.rank_upper->to_string()) : Json(nullptr)}};
  });

  std::size_t emit = 10;
  auto* realize_cmd = app.add_subcommand("realize", "list the first codes of a term");
  realize_cmd->add_option("expr", expr)->required();
  realize_cmd->add_option("--emit", emit, "number of codes")->default_val(10);
  realize_cmd->callback([&] {
    const auto codes = realize(term_of(expr)).first(emit);
    lines_mode = true;
    for (std::size_t i = 0; i < codes.size(); ++i) lines += std::to_string(i) + "\t" + to_string(codes[i]) + "\n";
  });

  auto* cmp_cmd = app.add_subcommand("cmp", "compare two codes of a term");
  cmp_cmd->add_option("expr", expr)->required();
  cmp_cmd->add_option("a", a_text)->required();
  cmp_cmd->add_option("b", b_text)->required();
  cmp_cmd->callback([&] {
    const CodedOrder o = realize(term_of(expr));
    const Code a = code_of(a_text), b = code_of(b_text);
    for (Code c : {a, b})
      if (!o.contains(c)) throw CliError(to_string(c) + " is not a member of " + o.name());
    const char* rel = a == b ? "eq" : o.less(a, b) ? "lt" : "gt";
    out = Json{{"a", a_text}, {"b", b_text}, {"order", rel}};
  });

  // epi
  auto* epi_cmd = app.add_subcommand("epi", "build, evaluate, check and search surjections");
  epi_cmd->require_subcommand(1);
  std::string kind, left, right, h, from, to, side = "right", id;
  std::uint64_t g = 0, n = 1, d = 1, m = 1, k = 1, seed = 0, prefix = 100, bound = 10000, budget = 10000;
  std::size_t sample = 8;

  auto* build_cmd = epi_cmd->add_subcommand("build", "construct a witness and print its id");
  build_cmd->add_option("--kind", kind)->required()->check(
      CLI::IsMember({"pieces", "mash", "lk", "zeta-seg", "revord", "prod"}));
  build_cmd->add_option("--left", left, "L (lk, prod)");
  build_cmd->add_option("--right", right, "K (lk)");
  build_cmd->add_option("--exponents", h, "comma list of exponents (zeta-seg)");
  build_cmd->add_option("--from", from, "lower exponent (zeta-seg)");
  build_cmd->add_option("--to", to, "upper exponent or w (zeta-seg)");
  build_cmd->add_option("--gamma", g, "reversed exponent (revord)");
  build_cmd->add_option("--n", n, "reversed multiple (revord)");
  build_cmd->add_option("--delta", d, "exponent (revord)");
  build_cmd->add_option("-m,--m", m, "multiple (revord) or source chain (prod)");
  build_cmd->add_option("-k,--k", k, "target chain (prod)");
  build_cmd->add_option("--side", side, "left or right (revord)");
  build_cmd->add_option("--seed", seed, "seed (pieces, mash, prod)");
  build_cmd->add_option("--sample", sample, "source codes to evaluate")->default_val(8);
  build_cmd->callback([&] {
    const std::string wid = build_id(kind, left, right, h, from, to, g, n, d, m, side, k, seed);
    out = witness_json(wid, build_witness(wid), sample);
  });

  std::string code_text;
  auto* eval_cmd = epi_cmd->add_subcommand("eval", "evaluate a witness at a code");
  eval_cmd->add_option("id", id)->required();
  eval_cmd->add_option("code", code_text)->required();
  eval_cmd->callback([&] {
    const EpiWitness w = build_witness(id);
    const Code c = code_of(code_text);
    if (!w.source.contains(c)) throw CliError(code_text + " is not a member of " + w.source.name());
    out = Json{{"id", id}, {"code", code_text}, {"image", to_string(w(c))}};
  });

  auto* check_cmd = epi_cmd->add_subcommand("check", "prefix check of a witness");
  check_cmd->add_option("id", id)->required();
  check_cmd->add_option("--prefix", prefix)->default_val(100);
  check_cmd->add_option("--bound", bound)->default_val(10000);
  check_cmd->callback([&] {
    Json r = report_json(check_epi_on_prefix(build_witness(id), prefix, bound));
    out = Json{{"id", id}, {"prefix", prefix}, {"bound", bound}};
    out.update(r);
  });

  auto* search_cmd = epi_cmd->add_subcommand("search", "bounded search for a surjection of K onto L");
  search_cmd->add_option("L", expr)->required();
  search_cmd->add_option("K", expr2)->required();
  search_cmd->add_option("--budget", budget)->default_val(10000);
  search_cmd->callback([&] {
    const SearchResult r = epi_search(realize(term_of(expr)), realize(term_of(expr2)), budget);
    out = Json{{"status", to_string(r.status)}, {"reason", r.reason}, {"spent", r.spent}};
    if (r.witness) out["provenance"] = r.witness->provenance;
    if (r.status == SearchResult::Status::NotFound) exit_code = 2;
  });

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive finite computations");
  oracle_cmd->require_subcommand(1);
  std::size_t om = 1, on = 1;
  auto* emb_cmd = oracle_cmd->add_subcommand("emb-count", "embeddings of the m-chain into the n-chain");
  emb_cmd->add_option("m", om)->required();
  emb_cmd->add_option("n", on)->required();
  emb_cmd->callback([&] {
    out = Json{{"count", enumerate_maps(FinOrder::chain(om), FinOrder::chain(on), MapKind::Emb).count}};
  });
  auto* epi_count_cmd = oracle_cmd->add_subcommand("epi-count", "surjections of the n-chain onto the m-chain");
  epi_count_cmd->add_option("m", om)->required();
  epi_count_cmd->add_option("n", on)->required();
  epi_count_cmd->callback([&] {
    out = Json{{"count", enumerate_maps(FinOrder::chain(om), FinOrder::chain(on), MapKind::Epi).count}};
  });
  std::size_t qa = 0, qk = 0, qj = 0;
  std::string phi_text;
  auto* quotient_cmd = oracle_cmd->add_subcommand("quotient", "K ->> J from L*K ->> L*J");
  quotient_cmd->add_option("--a", qa, "size of L");
  quotient_cmd->add_option("--k", qk, "size of K");
  quotient_cmd->add_option("--j", qj, "size of J");
  quotient_cmd->add_option("--phi", phi_text, "comma list of ranks of L*J");
  quotient_cmd->add_option("--seed", seed, "random instance when --phi is absent");
  quotient_cmd->callback([&] {
    FinQuotientInstance in;
    if (phi_text.empty()) {
      FuzzGen gen(seed);
      in = gen.quotient();
    } else {
      if (qa == 0 || qk == 0 || qj == 0) throw CliError("--a, --k and --j must be positive");
      in = {FinOrder::chain(qa), FinOrder::chain(qk), FinOrder::chain(qj), {}};
      for (const auto& r : split(phi_text, ',')) in.phi.push_back(number_of(r));
    }
    const FinMap psi = quotient_epi_fin(in.L, in.K, in.J, in.phi);
    out = Json{{"a", in.L.size()}, {"k", in.K.size()}, {"j", in.J.size()}, {"phi", in.phi}, {"psi", psi}};
  });

  // reduce
  auto* reduce_cmd = app.add_subcommand("reduce", "hardness reduction images");
  std::string rkind;
  std::vector<std::string> rargs;
  reduce_cmd->add_option("kind", rkind)->required()->check(CLI::IsMember({"wo", "nonscat", "main"}));
  reduce_cmd->add_option("exprs", rargs)->required();
  reduce_cmd->callback([&] {
    std::vector<OrderTerm> args;
    for (const auto& e : rargs) args.push_back(term_of(e));
    const ReduceKind rk = rkind == "wo" ? ReduceKind::WellOrder : rkind == "nonscat" ? ReduceKind::NonScattered
                                                                                      : ReduceKind::Main;
    const OrderTerm image = reduce(rk, args);
    const Verdict v = sts_verdict(image);
    out = Json{{"image", print(image)}, {"verdict", to_string(v.outcome)}, {"ruleTrace", v.rule_trace}};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const CliError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (lines_mode)
    std::cout << lines;
  else
    std::cout << out.dump() << "\n";
  return exit_code;
}
