// Command-line surface: one subcommand per module operation.
//
// Exit codes: 0 when the checked property holds, 1 when it fails, 2 for
// usage or domain errors.  Output is deterministic for fixed inputs: fixed
// default moduli, stable JSON key order, and no timing fields.
#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "permutri/analysis.hpp"
#include "permutri/families.hpp"
#include "permutri/galois.hpp"
#include "permutri/permcheck.hpp"
#include "permutri/search.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace permutri::cli {

namespace detail {

struct CommonOpts {
  std::string family;
  std::string field;
  std::uint64_t max_order = kDefaultSweepBound;
  std::uint32_t threads = 1;
  std::string format = "json";
  std::string out_path;
};

inline void add_common(CLI::App* cmd, CommonOpts& opts, bool with_family = true) {
  if (with_family)
    cmd->add_option("--family", opts.family,
                    "family instance, e.g. T21:m=7, T33:q=2,k=3,m=6, K5:k=2,m=6,a=0x5");
  cmd->add_option("--field", opts.field,
                  "field descriptor overriding the default modulus, e.g. gf:p=2,n=7,mod=0x83");
  cmd->add_option("--max-order", opts.max_order, "exhaustive sweep ceiling (field order)");
  cmd->add_option("--threads", opts.threads, "sweep partitions; results are identical for any count")
      ->check(CLI::Range(1u, 64u));
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", opts.out_path, "write output to a file instead of stdout");
}

inline void emit(const CommonOpts& opts, std::ostream& fallback, const std::string& text) {
  if (opts.out_path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(opts.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + opts.out_path);
  f << text;
}

inline std::pair<FamilyInstance, const FieldCtx*> resolve(const CommonOpts& opts) {
  if (opts.family.empty()) throw CLI::ValidationError("--family is required");
  const ParsedInstance parsed = parse_instance(opts.family);
  const FieldCtx* field = nullptr;
  if (!opts.field.empty()) field = &parse_field_descriptor(opts.field);
  return realize(parsed, field);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"permutation-trinomial toolkit over binary and odd-characteristic finite fields"};
  app.require_subcommand(1);

  detail::CommonOpts verify_opts, invert_opts, eval_opts, census_opts, analyze_opts,
      search_opts_c, catalog_opts;

  auto* verify = app.add_subcommand(
      "verify", "exhaustively check that a family instance permutes its field "
                "(exit 0 iff bijective)");
  detail::add_common(verify, verify_opts);

  auto* search = app.add_subcommand(
      "search", "enumerate canonical permutation trinomials x^e1+x^e2+x^e3 over GF(2^m)");
  detail::add_common(search, search_opts_c, false);
  std::uint32_t search_m = 0;
  bool search_classify = true, search_canonical_only = true;
  search->add_option("--m", search_m, "extension degree")->required();
  search->add_flag("--classify,!--no-classify", search_classify,
                   "match each triple against the instantiated catalog");
  search->add_flag("--canonical-only,!--full-orbits", search_canonical_only,
                   "list one representative per doubling orbit (default) or every orbit member");

  auto* invert = app.add_subcommand(
      "invert", "check a catalog compositional-inverse pair by exhaustive composition "
                "(C34/C35, C36/C37; exit 0 iff g(f(x)) = x everywhere)");
  detail::add_common(invert, invert_opts);

  auto* eval = app.add_subcommand("eval", "evaluate a family instance at one point");
  detail::add_common(eval, eval_opts);
  std::string eval_x;
  eval->add_option("--x", eval_x, "element, hex bit mask (0x..) or digit list [c0,c1,..]")
      ->required();

  auto* census = app.add_subcommand(
      "census", "count solutions of y^(2k) + y^k*ybar^k + ybar^(2k) = 0 in GF(q^m) "
                "(exit 0 iff y = 0 is the only solution)");
  detail::add_common(census, census_opts, false);
  std::uint64_t census_q = 0, census_k = 0;
  std::uint32_t census_m = 0;
  census->add_option("--q", census_q, "subfield order (prime power, not divisible by 3)")->required();
  census->add_option("--m", census_m, "even extension degree over GF(q)")->required();
  census->add_option("--k", census_k, "positive exponent parameter")->required();

  auto* analyze = app.add_subcommand(
      "analyze", "differential uniformity spectrum and fixed points of a family instance");
  detail::add_common(analyze, analyze_opts);

  auto* catalog_cmd = app.add_subcommand("catalog", "list every family with formula and conditions");
  detail::add_common(catalog_cmd, catalog_opts, false);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (app.got_subcommand(verify)) {
      auto [inst, ctx] = detail::resolve(verify_opts);
      const TrinomialSpec spec = instantiate(inst, *ctx);
      const Applicability app_res = applicability(inst);
      const VerificationReport rep =
          is_permutation(spec, {verify_opts.max_order, verify_opts.threads});
      if (verify_opts.format == "csv") {
        std::ostringstream os;
        os << "family,field,applicable,is_permutation,domain_size,image_deficit,collision\n"
           << detail::csv_escape(instance_string(inst)) << ','
           << detail::csv_escape(ctx->descriptor()) << ',' << (app_res.applicable ? "true" : "false")
           << ',' << (rep.is_permutation ? "true" : "false") << ',' << rep.domain_size << ','
           << rep.image_deficit << ',';
        if (rep.collision)
          os << detail::csv_escape(ctx->format_element(rep.collision->first) + "|" +
                                   ctx->format_element(rep.collision->second));
        os << '\n';
        detail::emit(verify_opts, out, os.str());
      } else {
        nlohmann::ordered_json j;
        j["family"] = instance_string(inst);
        j["field"] = ctx->descriptor();
        j["applicable"] = app_res.applicable;
        j["reason"] = app_res.reason;
        j.update(report_to_json(rep, *ctx));
        detail::emit(verify_opts, out, j.dump(2) + "\n");
      }
      return rep.is_permutation ? 0 : 1;
    }

    if (app.got_subcommand(search)) {
      SearchOptions sopts;
      sopts.classify = search_classify;
      sopts.threads = search_opts_c.threads;
      sopts.max_order = search_opts_c.max_order;
      if (!search_opts_c.field.empty()) {
        const FieldCtx& f = parse_field_descriptor(search_opts_c.field);
        if (f.characteristic() != 2 || f.degree() != search_m)
          throw std::invalid_argument("--field must describe GF(2^m) for the searched m");
        sopts.modulus = f.modulus();
      }
      SearchOutcome outcome = enumerate_trinomials(search_m, sopts);
      if (!search_canonical_only) {
        std::vector<SearchRecord> expanded;
        for (const SearchRecord& rec : outcome.records) {
          SearchRecord cur = rec;
          for (std::uint32_t j = 0; j < rec.orbit; ++j) {
            expanded.push_back(cur);
            cur.triple = double_triple(cur.triple);
            cur.triple.canonical = false;
          }
        }
        std::sort(expanded.begin(), expanded.end(),
                  [](const SearchRecord& a, const SearchRecord& b) { return a.triple.e < b.triple.e; });
        outcome.records = std::move(expanded);
      }
      detail::emit(search_opts_c, out,
                   search_opts_c.format == "csv" ? search_to_csv(outcome)
                                                 : search_to_jsonl(outcome));
      return 0;
    }

    if (app.got_subcommand(invert)) {
      auto [inst, ctx] = detail::resolve(invert_opts);
      FamilyId fwd, bwd;
      switch (inst.family) {
        case FamilyId::C34: fwd = FamilyId::C34; bwd = FamilyId::C35; break;
        case FamilyId::C35: fwd = FamilyId::C34; bwd = FamilyId::C35; break;
        case FamilyId::C36: fwd = FamilyId::C36; bwd = FamilyId::C37; break;
        case FamilyId::C37: fwd = FamilyId::C36; bwd = FamilyId::C37; break;
        default:
          throw std::invalid_argument("invert: no catalog inverse pair for " +
                                      std::string(family_name(inst.family)));
      }
      const FamilyInstance f_inst{fwd, inst.m, 2, 1, std::nullopt};
      const FamilyInstance g_inst{bwd, inst.m, 2, 1, std::nullopt};
      const TrinomialSpec f_spec = instantiate(f_inst, *ctx);
      const TrinomialSpec g_spec = instantiate(g_inst, *ctx);
      const ComposeReport rep =
          compose_check(f_spec, g_spec, {invert_opts.max_order, invert_opts.threads});
      nlohmann::ordered_json j;
      j["family"] = instance_string(f_inst);
      j["inverse_family"] = instance_string(g_inst);
      j["field"] = ctx->descriptor();
      j["is_inverse"] = rep.is_inverse;
      j["witness"] = rep.witness ? nlohmann::ordered_json(ctx->format_element(*rep.witness))
                                 : nlohmann::ordered_json(nullptr);
      const CatalogEntry& entry = catalog_entry(bwd);
      j["reading_note"] = std::string(entry.note);
      detail::emit(invert_opts, out, j.dump(2) + "\n");
      return rep.is_inverse ? 0 : 1;
    }

    if (app.got_subcommand(eval)) {
      auto [inst, ctx] = detail::resolve(eval_opts);
      const TrinomialSpec spec = instantiate(inst, *ctx);
      const std::uint64_t x = ctx->parse_element(eval_x);
      nlohmann::ordered_json j;
      j["family"] = instance_string(inst);
      j["field"] = ctx->descriptor();
      j["x"] = ctx->format_element(x);
      j["value"] = ctx->format_element(spec.eval_raw(x));
      detail::emit(eval_opts, out, j.dump(2) + "\n");
      return 0;
    }

    if (app.got_subcommand(census)) {
      const std::uint64_t count =
          eqa_solution_count(census_q, census_m, census_k,
                             {census_opts.max_order, census_opts.threads});
      const Applicability cond =
          applicability({FamilyId::T33, census_m, census_q, census_k, std::nullopt});
      nlohmann::ordered_json j;
      j["q"] = census_q;
      j["m"] = census_m;
      j["k"] = census_k;
      j["solution_count"] = count;
      j["only_zero_solution"] = count == 1;
      j["condition_holds"] = cond.applicable;
      j["condition"] = cond.reason;
      j["census_matches_condition"] = (count == 1) == cond.applicable;
      if (census_opts.format == "csv") {
        std::ostringstream os;
        os << "q,m,k,solution_count,only_zero_solution,condition_holds\n"
           << census_q << ',' << census_m << ',' << census_k << ',' << count << ','
           << (count == 1 ? "true" : "false") << ',' << (cond.applicable ? "true" : "false")
           << '\n';
        detail::emit(census_opts, out, os.str());
      } else {
        detail::emit(census_opts, out, j.dump(2) + "\n");
      }
      return count == 1 ? 0 : 1;
    }

    if (app.got_subcommand(analyze)) {
      auto [inst, ctx] = detail::resolve(analyze_opts);
      const TrinomialSpec spec = instantiate(inst, *ctx);
      const DifferentialProfile profile = differential_spectrum(
          spec, {std::min<std::uint64_t>(analyze_opts.max_order, kSpectrumBound),
                 analyze_opts.threads});
      const std::uint64_t fixed =
          fixed_point_count(spec, {analyze_opts.max_order, analyze_opts.threads});
      nlohmann::ordered_json body = profile_to_json(profile);
      body["fixed_points"] = fixed;
      body["field"] = ctx->descriptor();
      nlohmann::ordered_json j;
      j[instance_string(inst)] = std::move(body);
      detail::emit(analyze_opts, out, j.dump(2) + "\n");
      return 0;
    }

    if (app.got_subcommand(catalog_cmd)) {
      if (catalog_opts.format == "csv") {
        std::string text = "name,formula,params,conditions,provenance,note\n";
        for (const CatalogEntry& e : catalog()) {
          text += detail::csv_escape(std::string(e.name)) + ',' +
                  detail::csv_escape(std::string(e.formula)) + ',' +
                  detail::csv_escape(std::string(e.params)) + ',' +
                  detail::csv_escape(std::string(e.conditions)) + ',' +
                  detail::csv_escape(std::string(e.provenance)) + ',' +
                  detail::csv_escape(std::string(e.note)) + '\n';
        }
        detail::emit(catalog_opts, out, text);
      } else {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const CatalogEntry& e : catalog()) {
          nlohmann::ordered_json j;
          j["name"] = std::string(e.name);
          j["formula"] = std::string(e.formula);
          j["params"] = std::string(e.params);
          j["conditions"] = std::string(e.conditions);
          j["provenance"] = std::string(e.provenance);
          if (!e.note.empty()) j["note"] = std::string(e.note);
          arr.push_back(std::move(j));
        }
        detail::emit(catalog_opts, out, arr.dump(2) + "\n");
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand selected\n";
  return 2;
}

}  // namespace permutri::cli
