#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "ghkit/ghkit.hpp"
#include "ghkit/io.hpp"

namespace ghkit::cli {

struct Config {
  Tolerances tols;
  double pair_budget = 5e9;
  double gh_budget = 1e8;
  int threads = 0;
};

namespace detail {

inline std::vector<int> parse_int_list(const std::string& text) {
  // "0,2,5" or a range "1..32"
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    for (int i = lo; i <= hi; ++i) out.push_back(i);
    return out;
  }
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - pos);
    if (!tok.empty()) out.push_back(std::stoi(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::Usage, "empty index list: " + text);
  return out;
}

inline std::vector<Dist> parse_dist_list(const std::string& text) {
  std::vector<Dist> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw Error(ErrorCode::Usage, "empty list: " + text);
  return out;
}

// "0:1,1:0" -> map as vector indexed by the left side
inline std::vector<int> parse_index_map(const std::string& text, int domain_size) {
  std::vector<int> out(domain_size, -1);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos
                                                  ? std::string::npos
                                                  : comma - pos);
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::Usage, "map entries look like from:to, got " + tok);
    const int from = std::stoi(tok.substr(0, colon));
    const int to = std::stoi(tok.substr(colon + 1));
    if (from < 0 || from >= domain_size)
      throw Error(ErrorCode::IndexOutOfRange, "map key out of range", {from});
    out[from] = to;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  for (int i = 0; i < domain_size; ++i)
    if (out[i] < 0)
      throw Error(ErrorCode::Usage, "map must be total; missing key " +
                                        std::to_string(i));
  return out;
}

inline Json error_json(const Error& e) {
  Json j;
  j["error"] = error_code_name(e.code());
  if (!e.detail().empty()) j["detail"] = e.detail();
  if (!e.indices().empty()) j["indices"] = e.indices();
  if (e.value() != 0.0) j["value"] = e.value();
  return j;
}

inline Json interval_json(const Interval& iv) {
  Json j = Json::array();
  j.push_back(iv.lo);
  j.push_back(iv.hi);
  return j;
}

inline SequenceItem item_from_file(const std::string& path, Dist tau) {
  const SpaceFile sf = read_space_file(path, tau);
  SequenceItem item;
  item.space = sf.pointed();
  item.line_coords = try_line_embedding(item.space.space, std::max(tau, 1e-9));
  return item;
}

}  // namespace detail

// Entry point behind the ghkit binary: deterministic JSON on stdout,
// exit 0 on success, 1 on domain errors (machine-readable object), 2 on
// usage errors.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Gromov-Hausdorff computations on finite metric spaces"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Config cfg;
  if (const char* env = std::getenv("GHKIT_TOL")) {
    cfg.tols.metric = std::atof(env);
    cfg.tols.iso = cfg.tols.metric;
  }
  if (const char* env = std::getenv("GHKIT_BUDGET")) {
    cfg.pair_budget = std::atof(env);
    cfg.gh_budget = std::atof(env);
  }
  double seed = 0;  // reserved; no randomized algorithms in the core
  double tol_flag = -1.0, budget_flag = -1.0;
  app.add_option("--tol", tol_flag, "metric/isometry tolerance");
  app.add_option("--tol-solver", cfg.tols.solver, "solver tolerance");
  app.add_option("--budget", budget_flag, "enumeration budget");
  app.add_option("--threads", cfg.threads, "solver worker threads (0 = auto)");
  app.add_option("--seed", seed, "reserved");

  // validate
  std::string validate_file;
  auto* sc_validate = app.add_subcommand("validate", "check a space file");
  sc_validate->add_option("file", validate_file)->required();

  // hausdorff
  std::string hd_file, hd_a, hd_b;
  int hd_base_a = -1, hd_base_b = -1;
  auto* sc_hd = app.add_subcommand("hausdorff", "Hausdorff distance of subsets");
  sc_hd->add_option("space", hd_file)->required();
  sc_hd->add_option("--a", hd_a)->required();
  sc_hd->add_option("--b", hd_b)->required();
  sc_hd->add_option("--base-a", hd_base_a);
  sc_hd->add_option("--base-b", hd_base_b);

  // gh
  std::string gh_x, gh_y, gh_witness_out;
  bool gh_pointed = false, gh_bounds_only = false;
  auto* sc_gh = app.add_subcommand("gh", "Gromov-Hausdorff distance");
  sc_gh->add_option("X", gh_x)->required();
  sc_gh->add_option("Y", gh_y)->required();
  sc_gh->add_flag("--pointed", gh_pointed);
  sc_gh->add_flag("--bounds-only", gh_bounds_only);
  sc_gh->add_option("--witness-out", gh_witness_out);

  // approx
  std::string ap_x, ap_y;
  bool ap_pointed = false;
  auto* sc_ap = app.add_subcommand("approx", "minimal-defect approximation pair");
  sc_ap->add_option("X", ap_x)->required();
  sc_ap->add_option("Y", ap_y)->required();
  sc_ap->add_flag("--pointed", ap_pointed);

  // glue
  std::string gl_x, gl_y, gl_map;
  double gl_eps = 0.0;
  auto* sc_gl = app.add_subcommand("glue", "admissible metric from a map");
  sc_gl->add_option("X", gl_x)->required();
  sc_gl->add_option("Y", gl_y)->required();
  sc_gl->add_option("--map", gl_map)->required();
  sc_gl->add_option("--eps", gl_eps)->required();

  // restrict
  std::string re_x, re_indices, re_out;
  auto* sc_re = app.add_subcommand("restrict", "restrict a space to a subset");
  sc_re->add_option("X", re_x)->required();
  sc_re->add_option("--indices", re_indices)->required();
  sc_re->add_option("-o,--out", re_out);

  // isometry
  std::string is_x, is_y;
  bool is_pointed = false;
  auto* sc_is = app.add_subcommand("isometry", "exact isometry search");
  sc_is->add_option("X", is_x)->required();
  sc_is->add_option("Y", is_y)->required();
  sc_is->add_flag("--pointed", is_pointed);

  // length
  std::string le_x;
  int le_from = 0, le_to = 0, le_depth = 3;
  double le_eps = 0.1;
  auto* sc_le = app.add_subcommand("length", "dyadic approximate geodesic");
  sc_le->add_option("X", le_x)->required();
  sc_le->add_option("--from", le_from)->required();
  sc_le->add_option("--to", le_to)->required();
  sc_le->add_option("--depth", le_depth);
  sc_le->add_option("--eps", le_eps);

  // converge
  std::string cv_seq = "lattice", cv_reference, cv_indices = "1..8",
              cv_radii = "1", cv_csv, cv_space, cv_factor;
  double cv_R = 1.0, cv_mesh0 = 1.0, cv_scale0 = 1.0, cv_alpha_c = 1.0,
         cv_h_ref = 1e-3;
  int cv_n0 = 4;
  bool cv_alternating = false;
  auto* sc_cv = app.add_subcommand("converge", "pointed-convergence harness");
  sc_cv->add_option("--seq", cv_seq,
                    "lattice|cycle|constant|rescaled|product");
  sc_cv->add_option("--reference", cv_reference)->required();
  sc_cv->add_option("--indices", cv_indices);
  sc_cv->add_option("--radii", cv_radii);
  sc_cv->add_option("--csv", cv_csv);
  sc_cv->add_option("--R", cv_R);
  sc_cv->add_option("--mesh0", cv_mesh0, "lattice mesh law mesh0/i");
  sc_cv->add_option("--n0", cv_n0, "cycle size law n0*i");
  sc_cv->add_option("--scale0", cv_scale0, "cycle scale law scale0/i");
  sc_cv->add_option("--space", cv_space, "base space for constant/rescaled/product");
  sc_cv->add_option("--factor", cv_factor, "shrinking factor space for product");
  sc_cv->add_option("--alpha-c", cv_alpha_c, "rescaled law 1 + c/i");
  sc_cv->add_flag("--alternating", cv_alternating, "rescaled law 1 + c(-1)^i/i");
  sc_cv->add_option("--h-ref", cv_h_ref, "declared reference mesh");

  // schedule
  std::string sd_table, sd_h = "id", sd_subseq;
  auto* sc_sd = app.add_subcommand("schedule", "radius schedule from an eps table");
  sc_sd->set_help_flag("--help", "print help");  // frees -h for the --h option
  sc_sd->add_option("--table", sd_table)->required();
  sc_sd->add_option("--h", sd_h);
  sc_sd->add_option("--subseq", sd_subseq, "measured-subsequence variant");

  // sublimit
  std::string sl_dir, sl_subseq;
  double sl_r = 1.0;
  auto* sc_sl = app.add_subcommand("sublimit", "medoid sublimit of space files");
  sc_sl->add_option("--spaces", sl_dir)->required();
  sc_sl->add_option("--subseq", sl_subseq)->required();
  sc_sl->add_option("--r", sl_r);

  // accum
  std::string ac_csv;
  double ac_tol = 0.05;
  auto* sc_ac = app.add_subcommand("accum", "accumulation points of a series");
  sc_ac->add_option("--csv", ac_csv)->required();
  sc_ac->add_option("--tol", ac_tol);

  // gen
  std::string gen_seq, gen_space, gen_out;
  double gen_mesh = 1.0, gen_R = 1.0, gen_scale = 1.0, gen_alpha = 1.0;
  int gen_n = 4;
  auto* sc_gen = app.add_subcommand("gen", "materialize a generator space");
  sc_gen->add_option("--seq", gen_seq, "lattice|cycle|rescaled")->required();
  sc_gen->add_option("--mesh", gen_mesh);
  sc_gen->add_option("--R", gen_R);
  sc_gen->add_option("--n", gen_n);
  sc_gen->add_option("--scale", gen_scale);
  sc_gen->add_option("--space", gen_space);
  sc_gen->add_option("--alpha", gen_alpha);
  sc_gen->add_option("-o,--out", gen_out);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  // Precedence: flags over environment over built-in defaults.
  if (tol_flag > 0.0) {
    cfg.tols.metric = tol_flag;
    cfg.tols.iso = tol_flag;
  }
  if (budget_flag > 0.0) {
    cfg.pair_budget = budget_flag;
    cfg.gh_budget = budget_flag;
  }

  try {
    Json result;

    if (*sc_validate) {
      const SpaceFile sf = read_space_file(validate_file, cfg.tols.metric);
      result["valid"] = true;
      result["n"] = sf.space.n;
      result["diameter"] = diameter(sf.space);
      if (sf.base) result["base"] = *sf.base;
    } else if (*sc_hd) {
      const SpaceFile sf = read_space_file(hd_file, cfg.tols.metric);
      const SubsetRef a = detail::parse_int_list(hd_a);
      const SubsetRef b = detail::parse_int_list(hd_b);
      HausdorffWitness w;
      Dist value;
      if (hd_base_a >= 0 || hd_base_b >= 0) {
        if (hd_base_a < 0 || hd_base_b < 0)
          throw Error(ErrorCode::Usage, "--base-a and --base-b go together");
        value = pointed_hausdorff(sf.space, a, hd_base_a, b, hd_base_b, &w);
      } else {
        value = hausdorff(sf.space, a, b, &w);
      }
      result["value"] = value;
      result["witnesses"] = Json{{"far_a", w.far_a},
                                 {"near_b", w.near_b},
                                 {"far_b", w.far_b},
                                 {"near_a", w.near_a}};
    } else if (*sc_gh) {
      const SpaceFile fx = read_space_file(gh_x, cfg.tols.metric);
      const SpaceFile fy = read_space_file(gh_y, cfg.tols.metric);
      Interval iv;
      if (gh_pointed)
        iv = gh_bounds_pointed(fx.pointed(), fy.pointed(), cfg.pair_budget,
                               cfg.threads);
      else
        iv = gh_bounds(fx.space, fy.space, cfg.pair_budget, cfg.threads);
      result["interval"] = detail::interval_json(iv);
      if (!gh_bounds_only) {
        const GhResult r =
            gh_pointed
                ? gh_pointed_exact(fx.pointed(), fy.pointed(), cfg.gh_budget,
                                   cfg.tols, cfg.threads)
                : gh_exact(fx.space, fy.space, cfg.gh_budget, cfg.tols, cfg.threads);
        result["value"] = r.value;
        if (!gh_witness_out.empty()) {
          Json w = admissible_to_json(r.witness);
          w["level_t"] = r.level_t;
          w["level_s"] = r.level_s;
          std::ofstream os(gh_witness_out);
          dump_json(w, os);
          result["witness_file"] = gh_witness_out;
        }
      }
    } else if (*sc_ap) {
      const SpaceFile fx = read_space_file(ap_x, cfg.tols.metric);
      const SpaceFile fy = read_space_file(ap_y, cfg.tols.metric);
      std::optional<std::pair<int, int>> pointed;
      if (ap_pointed) pointed = std::make_pair(fx.base.value_or(0), fy.base.value_or(0));
      const BestPairResult bp =
          best_pair(fx.space, fy.space, pointed, cfg.pair_budget, cfg.threads);
      result["f"] = bp.pair.f;
      result["g"] = bp.pair.g;
      result["defect"] = bp.eps_star;
      result["sandwich"] = Json::array({0.5 * bp.eps_star, 2.0 * bp.eps_star});
    } else if (*sc_gl) {
      const SpaceFile fx = read_space_file(gl_x, cfg.tols.metric);
      const SpaceFile fy = read_space_file(gl_y, cfg.tols.metric);
      const std::vector<int> map = detail::parse_index_map(gl_map, fx.space.n);
      const AdmissibleMetric adm =
          glue_from_pair(fx.space, fy.space, map, gl_eps, cfg.tols.metric);
      result = admissible_to_json(adm);
      result["hausdorff"] = hausdorff_under(adm);
      if (fx.base && fy.base)
        result["pointed"] = hausdorff_under(adm, std::make_pair(*fx.base, *fy.base));
    } else if (*sc_re) {
      const SpaceFile fx = read_space_file(re_x, cfg.tols.metric);
      const FiniteMetricSpace sub =
          restrict(fx.space, detail::parse_int_list(re_indices));
      result = space_to_json(sub);
      if (!re_out.empty()) {
        std::ofstream os(re_out);
        dump_json(result, os);
        result = Json{{"written", re_out}, {"n", sub.n}};
      }
    } else if (*sc_is) {
      const SpaceFile fx = read_space_file(is_x, cfg.tols.metric);
      const SpaceFile fy = read_space_file(is_y, cfg.tols.metric);
      std::optional<std::vector<int>> witness;
      if (is_pointed)
        witness = find_isometry(fx.pointed(), fy.pointed(), cfg.tols.iso);
      else
        witness = find_isometry(fx.space, fy.space, cfg.tols.iso);
      result["isometric"] = witness.has_value();
      if (witness) result["map"] = *witness;
    } else if (*sc_le) {
      const SpaceFile fx = read_space_file(le_x, cfg.tols.metric);
      const DyadicCurve curve = dyadic_curve(fx.space, le_from, le_to, le_depth, le_eps);
      result["curve"] = curve.points;
      result["length"] = curve.length;
      result["surplus"] = curve.surplus;
      result["required_tol"] = curve.required_tol;
      result["achieved_tol"] = curve.achieved_tol;
    } else if (*sc_cv) {
      const SequenceItem reference = detail::item_from_file(cv_reference, cfg.tols.metric);
      SpaceSequence seq;
      if (cv_seq == "lattice") {
        seq = seq_scaled_lattice(cv_R, [m = cv_mesh0](int i) { return m / i; });
      } else if (cv_seq == "cycle") {
        seq = seq_cycle([n = cv_n0](int i) { return n * i; },
                        [s = cv_scale0](int i) { return s / i; });
      } else if (cv_seq == "constant") {
        const SpaceFile sf = read_space_file(cv_space, cfg.tols.metric);
        seq = seq_constant(sf.pointed());
      } else if (cv_seq == "rescaled") {
        const SpaceFile sf = read_space_file(cv_space, cfg.tols.metric);
        const double c = cv_alpha_c;
        const bool alt = cv_alternating;
        seq = seq_rescaled(sf.space, sf.base.value_or(0), [c, alt](int i) {
          return alt ? 1.0 + c * (i % 2 == 0 ? 1.0 : -1.0) / i : 1.0 + c / i;
        });
      } else if (cv_seq == "product") {
        const SpaceFile sf = read_space_file(cv_space, cfg.tols.metric);
        const SpaceFile ff = read_space_file(cv_factor, cfg.tols.metric);
        seq = seq_product_shrink(sf.pointed(), ff.pointed(),
                                 [](int i) { return 1.0 / i; });
      } else {
        throw Error(ErrorCode::BadDescriptor, "unknown generator " + cv_seq);
      }
      HarnessConfig hcfg;
      hcfg.tols = cfg.tols;
      hcfg.gh_budget = cfg.gh_budget;
      hcfg.pair_budget = cfg.pair_budget;
      hcfg.threads = cfg.threads;
      const ConvergenceReport rep =
          run_harness(seq, reference, cv_h_ref, detail::parse_dist_list(cv_radii),
                      detail::parse_int_list(cv_indices), hcfg);
      result["indices"] = rep.indices;
      result["radii"] = rep.radii;
      result["verdict"] = rep.converged ? "converged" : "undecided";
      result["tol_verdict"] = rep.tol_verdict;
      Json per_radius = Json::array();
      for (std::size_t r = 0; r < rep.radii.size(); ++r) {
        Json row;
        row["radius"] = rep.radii[r];
        row["converged"] = static_cast<bool>(rep.radius_converged[r]);
        Json cells = Json::array();
        for (std::size_t k = 0; k < rep.indices.size(); ++k) {
          const CurveCell& c = rep.cells[r][k];
          cells.push_back(Json{{"index", rep.indices[k]},
                               {"lo", c.lo},
                               {"hi", c.hi},
                               {"mode", cell_mode_name(c.mode)}});
        }
        row["cells"] = std::move(cells);
        per_radius.push_back(std::move(row));
      }
      result["per_radius"] = std::move(per_radius);
      result["diam_curve"] = rep.diam_curve;
      result["diam_reference"] = rep.diam_reference;
      if (!cv_csv.empty()) {
        std::ofstream os(cv_csv);
        write_curve_csv(rep, os);
        result["csv"] = cv_csv;
      }
    } else if (*sc_sd) {
      if (sd_h != "id")
        throw Error(ErrorCode::Usage, "only --h id is available");
      std::ifstream in(sd_table);
      if (!in) throw Error(ErrorCode::FileFormat, sd_table + ": cannot open");
      const EpsTable table = read_eps_table_csv(in, sd_table);
      const auto identity = [](Dist v) { return v; };
      const ScheduleResult res =
          sd_subseq.empty()
              ? select_radius_schedule(table, identity)
              : radius_schedule_measured(table, detail::parse_int_list(sd_subseq),
                                         identity);
      result["schedule"] = res.schedule;
      result["exceptional"] = res.exceptional;
    } else if (*sc_sl) {
      std::vector<std::string> files;
      for (const auto& entry : std::filesystem::directory_iterator(sl_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path().string());
      std::sort(files.begin(), files.end());
      if (files.empty())
        throw Error(ErrorCode::FileFormat, sl_dir + ": no space files");
      std::vector<PointedSpace> spaces;
      spaces.reserve(files.size());
      for (const auto& f : files)
        spaces.push_back(read_space_file(f, cfg.tols.metric).pointed());
      const std::vector<int> subseq = detail::parse_int_list(sl_subseq);
      for (int i : subseq)
        if (i < 0 || i >= static_cast<int>(spaces.size()))
          throw Error(ErrorCode::IndexOutOfRange, "subsequence index out of range",
                      {i});
      const SublimitResult res = sublimit_space(
          [&](int i) { return spaces[i]; }, subseq, sl_r, cfg.gh_budget, cfg.tols,
          cfg.threads);
      result["medoid_index"] = res.medoid_index;
      result["spread"] = res.spread;
    } else if (*sc_ac) {
      std::ifstream in(ac_csv);
      if (!in) throw Error(ErrorCode::FileFormat, ac_csv + ": cannot open");
      const std::vector<Dist> series = read_series_csv(in, ac_csv);
      const auto points = accumulation_points(series, ac_tol);
      Json values = Json::array();
      Json certs = Json::array();
      for (const auto& p : points) {
        values.push_back(p.value);
        certs.push_back(p.indices);
      }
      result["points"] = std::move(values);
      result["certificates"] = std::move(certs);
    } else if (*sc_gen) {
      Json space_json;
      if (gen_seq == "lattice") {
        const SequenceItem item = lattice_space(gen_R, gen_mesh);
        space_json = space_to_json(item.space.space, item.space.base);
      } else if (gen_seq == "cycle") {
        const PointedSpace ps = cycle_space(gen_n, gen_scale);
        space_json = space_to_json(ps.space, ps.base);
      } else if (gen_seq == "rescaled") {
        const SpaceFile sf = read_space_file(gen_space, cfg.tols.metric);
        space_json = space_to_json(rescale(sf.space, gen_alpha), sf.base);
      } else {
        throw Error(ErrorCode::BadDescriptor, "unknown generator " + gen_seq);
      }
      // Round trip through validation so emitted files are known good.
      space_from_json(space_json, "generated", cfg.tols.metric);
      if (!gen_out.empty()) {
        std::ofstream os(gen_out);
        dump_json(space_json, os);
        result = Json{{"written", gen_out}};
      } else {
        result = std::move(space_json);
      }
    }

    dump_json(result, out);
    return 0;
  } catch (const Error& e) {
    dump_json(detail::error_json(e), out);
    return 1;
  } catch (const std::exception& e) {
    // Malformed input that slipped past the format checks.
    dump_json(detail::error_json(Error(ErrorCode::FileFormat, e.what())), out);
    return 1;
  }
}

inline int run_main(int argc, char** argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out, err);
}

}  // namespace ghkit::cli
