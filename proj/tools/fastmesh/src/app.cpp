#include "fastmesh_cli/app.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastmesh/dataset_filter.hpp"
#include "fastmesh/error.hpp"
#include "fastmesh/face_builder.hpp"
#include "fastmesh/filtering.hpp"
#include "fastmesh/mesh_io.hpp"
#include "fastmesh/metrics.hpp"
#include "fastmesh/scorers.hpp"
#include "fastmesh/tokenizer.hpp"
#include "fastmesh/toy_edge_model.hpp"
#include "fastmesh_cli/config.hpp"
#include "fastmesh_cli/pipeline.hpp"

namespace fastmesh::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.close();
  if (!f) fail(ErrorCode::kIo, "cannot write " + path.string());
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text(path, text);
  }
}

ordered_json stats_json(const TokenStats& s) {
  return {{"n_vertices", s.n_vertices},     {"n_blocks", s.n_blocks},
          {"n_tokens", s.n_tokens},         {"vanilla_estimate", s.vanilla_estimate},
          {"bpt_estimate", s.bpt_estimate}, {"ratio_vs_bpt", s.ratio_vs_bpt}};
}

ordered_json steps_json(const FilterResult& r) {
  ordered_json steps = ordered_json::array();
  for (const auto& st : r.steps) {
    steps.push_back({{"step", st.step},
                     {"mask", st.mask},
                     {"candidates", st.candidates},
                     {"edges", st.edges},
                     {"faces", st.faces},
                     {"bandwidth", st.bandwidth}});
  }
  return steps;
}

// Options shared by every subcommand.
struct Common {
  bool json = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_flag("--json", c.json, "Machine-readable JSON on stdout");
  sub->add_option("--seed", c.seed, "Random seed");
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs, const std::string& manifest) {
  std::vector<fs::path> out(inputs.begin(), inputs.end());
  if (!manifest.empty()) {
    const auto listed = parse_manifest(read_text(manifest), fs::path(manifest).parent_path());
    out.insert(out.end(), listed.begin(), listed.end());
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mesh tokenization, edge prediction and reconstruction toolkit", "fastmesh"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fastmesh 0.1.0");

  std::function<int()> action;

  // pipeline
  PipelineConfig pcfg;
  Common pc;
  std::string config_path, p_input, p_outdir, p_scorer, p_enhancer;
  std::size_t p_bw = 0, p_cand = 0, p_knn = 0, p_topk = 0, p_points = 0;
  double p_temp = 0, p_topp = 0;
  int p_bits = 7;
  auto* pipeline = app.add_subcommand("pipeline", "Run normalize..metrics end to end on one mesh");
  pipeline->add_option("input", p_input, "Input OBJ");
  pipeline->add_option("-c,--config", config_path, "JSON config; flags override its keys");
  auto* o_outdir = pipeline->add_option("-o,--output-dir", p_outdir, "Directory for the artifacts");
  auto* o_scorer = pipeline->add_option("--scorer", p_scorer, "oracle | knn | toy:<model.json>");
  auto* o_enh = pipeline->add_option("--enhancer", p_enhancer, "cell_center | snap_oracle");
  auto* o_bw = pipeline->add_option("--bandwidth-margin", p_bw);
  auto* o_cand = pipeline->add_option("--candidate-margin", p_cand);
  auto* o_knn = pipeline->add_option("--knn-k", p_knn);
  auto* o_temp = pipeline->add_option("--temperature", p_temp);
  auto* o_topk = pipeline->add_option("--top-k", p_topk);
  auto* o_topp = pipeline->add_option("--top-p", p_topp);
  auto* o_points = pipeline->add_option("--points", p_points, "Surface samples per metric");
  auto* o_bits = pipeline->add_option("--quantization-bits", p_bits, "Must be 7");
  add_common(pipeline, pc);
  pipeline->callback([&] {
    action = [&]() -> int {
      if (!config_path.empty()) apply_config_json(pcfg, read_text(config_path));
      if (!p_input.empty()) pcfg.input = p_input;
      if (o_outdir->count()) pcfg.output_dir = p_outdir;
      if (o_scorer->count()) pcfg.scorer = p_scorer;
      if (o_enh->count()) pcfg.enhancer = p_enhancer;
      if (o_bw->count()) pcfg.bandwidth_margin = p_bw;
      if (o_cand->count()) pcfg.candidate_margin = p_cand;
      if (o_knn->count()) pcfg.knn_k = p_knn;
      if (o_temp->count()) pcfg.temperature = p_temp;
      if (o_topk->count()) pcfg.top_k = p_topk;
      if (o_topp->count()) pcfg.top_p = p_topp;
      if (o_points->count()) pcfg.metric_points = p_points;
      if (o_bits->count()) pcfg.quantization_bits = p_bits;
      if (pipeline->get_option("--seed")->count()) pcfg.seed = pc.seed;
      if (pcfg.input.empty()) throw UsageError("pipeline needs an input mesh");
      validate(pcfg);
      const auto artifacts = run_pipeline(pcfg);
      write_artifacts(artifacts, pcfg.output_dir);
      if (pc.json) {
        out << artifacts.summary_json;
      } else {
        const auto s = ordered_json::parse(artifacts.summary_json);
        out << "wrote " << (pcfg.output_dir / (artifacts.stem + ".*")).string() << "\n"
            << "tokens " << s["token_stats"]["n_tokens"] << ", reconstructed faces "
            << s["counts"]["reconstructed_faces"] << ", edge f1 " << s["edge_scores"]["f1"] << "\n";
      }
      return kExitOk;
    };
  });

  // tokenize
  Common tc;
  std::string t_input, t_out;
  bool t_raw = false;
  auto* tok = app.add_subcommand("tokenize", "Normalize, quantize and block-index an OBJ");
  tok->add_option("input", t_input, "Input OBJ")->required();
  tok->add_option("-o,--output", t_out, "Token file (default stdout)");
  tok->add_flag("--no-normalize", t_raw, "Input is already inside [0,1)^3");
  add_common(tok, tc);
  tok->callback([&] {
    action = [&]() -> int {
      Mesh m = read_obj(t_input);
      if (!t_raw) m = normalize(m);
      const auto q = quantize(m);
      const auto seq = tokenize(q.vertices);
      if (tc.json) {
        if (!t_out.empty()) write_text(t_out, write_tokens(seq));
        ordered_json j{{"n_vertices", q.vertices.size()}, {"n_tokens", seq.tokens.size()}, {"tokens", seq.tokens}};
        out << j.dump() << "\n";
      } else {
        emit(t_out, write_tokens(seq), out);
      }
      return kExitOk;
    };
  });

  // detokenize
  Common dc;
  std::string d_input, d_out;
  auto* detok = app.add_subcommand("detokenize", "Decode a token file into lattice vertices");
  detok->add_option("input", d_input, "Token file")->required();
  detok->add_option("-o,--output", d_out, "OBJ point cloud of cell centers");
  add_common(detok, dc);
  detok->callback([&] {
    action = [&]() -> int {
      const auto pts = detokenize(parse_tokens(read_text(d_input)));
      if (!d_out.empty()) {
        Mesh m;
        for (const auto& p : pts) m.vertices.push_back(enhance_cell_center(p));
        save_obj(m, d_out);
      }
      if (dc.json) {
        ordered_json v = ordered_json::array();
        for (const auto& p : pts) v.push_back({p.x, p.y, p.z});
        out << ordered_json{{"n_vertices", pts.size()}, {"vertices", v}}.dump() << "\n";
      } else if (d_out.empty()) {
        for (const auto& p : pts) out << int(p.x) << ' ' << int(p.y) << ' ' << int(p.z) << '\n';
      }
      return kExitOk;
    };
  });

  // stats (batch)
  Common sc;
  std::vector<std::string> s_inputs;
  std::string s_manifest;
  auto* stats = app.add_subcommand("stats", "Token statistics for one or more meshes");
  stats->add_option("inputs", s_inputs, "Input OBJ files");
  stats->add_option("-m,--manifest", s_manifest, "File listing one OBJ path per line");
  add_common(stats, sc);
  stats->callback([&] {
    action = [&]() -> int {
      const auto paths = expand_inputs(s_inputs, s_manifest);
      if (paths.empty()) throw UsageError("stats needs at least one input");
      ordered_json items = ordered_json::array();
      bool any_failed = false;
      for (const auto& p : paths) {
        ordered_json item{{"path", p.generic_string()}};
        try {
          const Mesh m = read_obj(p);
          const auto s = token_stats(normalize(m));
          item["faces"] = m.faces.size();
          item["stats"] = stats_json(s);
          if (!sc.json) {
            out << p.string() << ": V=" << s.n_vertices << " blocks=" << s.n_blocks
                << " tokens=" << s.n_tokens << " ratio_vs_bpt=" << std::setprecision(4) << s.ratio_vs_bpt << "\n";
          }
        } catch (const Error& e) {
          any_failed = true;
          item["error"] = e.what();
          err << p.string() << ": " << e.what() << "\n";
        }
        items.push_back(item);
      }
      if (sc.json) out << ordered_json{{"schema_version", 1}, {"items", items}}.dump(2) << "\n";
      return any_failed ? kExitData : kExitOk;
    };
  });

  // fidelity
  Common fc;
  std::string f_input, f_enh = "snap_oracle", f_qout, f_eout;
  std::size_t f_points = kDefaultSamplePoints;
  auto* fid = app.add_subcommand("fidelity", "Quantization error before and after enhancement");
  fid->add_option("input", f_input, "Input OBJ")->required();
  fid->add_option("--enhancer", f_enh, "cell_center | snap_oracle")
      ->check(CLI::IsMember({"cell_center", "snap_oracle"}));
  fid->add_option("--points", f_points)->check(CLI::PositiveNumber);
  fid->add_option("--quantized-out", f_qout, "Write the cell-center mesh here");
  fid->add_option("--enhanced-out", f_eout, "Write the enhanced mesh here");
  add_common(fid, fc);
  fid->callback([&] {
    action = [&]() -> int {
      const Mesh m = normalize(read_obj(f_input));
      const auto enh = make_enhancer(f_enh, m.vertices);
      const auto r = fidelity_report(m, *enh, f_points, fc.seed);
      if (!f_qout.empty() || !f_eout.empty()) {
        const auto meshes = fidelity_meshes(quantize(m), *enh);
        if (!f_qout.empty()) save_obj(meshes.quantized, f_qout);
        if (!f_eout.empty()) save_obj(meshes.enhanced, f_eout);
      }
      ordered_json j{{"cd_quantized", r.cd_quantized},   {"hd_quantized", r.hd_quantized},
                     {"cd_enhanced", r.cd_enhanced},     {"hd_enhanced", r.hd_enhanced},
                     {"n_vertices_before", r.n_vertices_before}, {"n_vertices_after", r.n_vertices_after}};
      if (fc.json) {
        out << j.dump(2) << "\n";
      } else {
        out << "quantized: cd " << r.cd_quantized << " hd " << r.hd_quantized << "\n"
            << "enhanced:  cd " << r.cd_enhanced << " hd " << r.hd_enhanced << "\n"
            << "vertices:  " << r.n_vertices_before << " -> " << r.n_vertices_after << "\n";
      }
      return kExitOk;
    };
  });

  // train-edge
  Common ec;
  std::vector<std::string> e_inputs;
  std::string e_manifest, e_model, e_curve;
  ToyTrainConfig tcfg;
  auto* train = app.add_subcommand("train-edge", "Train the toy edge predictor on small meshes");
  train->add_option("inputs", e_inputs, "Training OBJ files");
  train->add_option("-m,--manifest", e_manifest, "File listing one OBJ path per line");
  train->add_option("-o,--model", e_model, "Output model JSON")->required();
  train->add_option("--loss-curve", e_curve, "Write epoch,loss CSV here");
  train->add_option("--epochs", tcfg.epochs)->check(CLI::Range(std::size_t{1}, std::size_t{1'000'000}));
  train->add_option("--lr", tcfg.learning_rate)->check(CLI::PositiveNumber);
  train->add_option("--gamma-pos", tcfg.gammas.positive)->check(CLI::NonNegativeNumber);
  train->add_option("--gamma-neg", tcfg.gammas.negative)->check(CLI::NonNegativeNumber);
  train->add_option("--heads", tcfg.shape.heads)->check(CLI::Range(1, 64));
  train->add_option("--dims", tcfg.shape.dims)->check(CLI::Range(2, 64));
  train->add_option("--hidden", tcfg.shape.hidden)->check(CLI::Range(1, 1024));
  train->add_option("--head-hidden", tcfg.shape.head_hidden)->check(CLI::Range(1, 1024));
  add_common(train, ec);
  train->callback([&] {
    action = [&]() -> int {
      const auto paths = expand_inputs(e_inputs, e_manifest);
      if (paths.empty()) throw UsageError("train-edge needs at least one input");
      std::vector<Mesh> meshes;
      for (const auto& p : paths) meshes.push_back(normalize(read_obj(p)));
      tcfg.seed = ec.seed;
      const auto result = train_toy(meshes, tcfg);
      write_text(e_model, write_toy_model(result.model));
      if (!e_curve.empty()) write_text(e_curve, write_loss_curve(result.loss_curve));

      std::size_t tp = 0, fp = 0, fn = 0;
      for (const auto& m : meshes) {
        const auto truth = adjacency_of(m);
        const ToyScorer scorer(result.model, m.vertices);
        const auto pred = threshold(score_pairs(scorer, m.vertices.size()), m.vertices.size());
        for (auto e : pred.edges()) (truth.contains(e.i, e.j) ? tp : fp) += 1;
        for (auto e : truth.edges()) fn += pred.contains(e.i, e.j) ? 0 : 1;
      }
      const double recall = tp + fn ? double(tp) / double(tp + fn) : 1.0;
      const double precision = tp + fp ? double(tp) / double(tp + fp) : 1.0;
      ordered_json j{{"meshes", meshes.size()},
                     {"epochs", tcfg.epochs},
                     {"parameter_count", result.model.parameter_count()},
                     {"initial_loss", result.loss_curve.front()},
                     {"final_loss", result.loss_curve.back()},
                     {"train_recall", recall},
                     {"train_precision", precision}};
      if (ec.json) {
        out << j.dump(2) << "\n";
      } else {
        out << "loss " << result.loss_curve.front() << " -> " << result.loss_curve.back()
            << ", train recall " << recall << ", precision " << precision << "\n";
      }
      return kExitOk;
    };
  });

  // score
  Common scc;
  std::string c_input, c_scorer = "oracle", c_out;
  std::size_t c_knn = 6;
  auto* score = app.add_subcommand("score", "Edge logits for every vertex pair of a mesh");
  score->add_option("input", c_input, "Input OBJ")->required();
  score->add_option("--scorer", c_scorer, "oracle | knn | toy:<model.json>");
  score->add_option("--knn-k", c_knn)->check(CLI::PositiveNumber);
  score->add_option("-o,--output", c_out, "Logit file (default stdout)");
  add_common(score, scc);
  score->callback([&] {
    action = [&]() -> int {
      const Mesh m = normalize(read_obj(c_input));
      const auto scorer = make_scorer(c_scorer, m.vertices, adjacency_of(m), c_knn);
      const auto logits = score_pairs(*scorer, m.vertices.size());
      if (scc.json) {
        if (!c_out.empty()) write_text(c_out, write_logits(logits));
        std::size_t positive = 0;
        for (const auto& l : logits) positive += l.logit > 0;
        out << ordered_json{{"pairs", logits.size()}, {"positive", positive}}.dump() << "\n";
      } else {
        emit(c_out, write_logits(logits), out);
      }
      return kExitOk;
    };
  });

  // reconstruct
  Common rc;
  std::string r_logits, r_vertices, r_out;
  auto* recon = app.add_subcommand("reconstruct", "Threshold logits and extract faces");
  recon->add_option("--logits", r_logits, "Logit file")->required();
  recon->add_option("--vertices", r_vertices, "OBJ providing the vertex positions")->required();
  recon->add_option("-o,--output", r_out, "Output OBJ (default stdout)");
  add_common(recon, rc);
  recon->callback([&] {
    action = [&]() -> int {
      const Mesh src = read_obj(r_vertices);
      const auto adj = threshold(parse_logits(read_text(r_logits)), src.vertices.size());
      const Mesh m = mesh_from_adjacency(adj, src.vertices);
      if (rc.json) {
        if (!r_out.empty()) write_text(r_out, write_obj(m));
        out << ordered_json{{"edges", adj.edge_count()}, {"faces", m.faces.size()}}.dump() << "\n";
      } else {
        emit(r_out, write_obj(m), out);
      }
      return kExitOk;
    };
  });

  // filter
  Common flc;
  std::string l_input, l_scorer = "oracle", l_refine, l_out, l_mesh, l_stats;
  FilterOptions l_opts;
  std::size_t l_knn = 6;
  auto* filt = app.add_subcommand("filter", "Five-step masked prediction filtering on one mesh");
  filt->add_option("input", l_input, "Input OBJ")->required();
  filt->add_option("--scorer", l_scorer, "Scorer for the unmasked first step");
  filt->add_option("--refine-scorer", l_refine, "Scorer for the masked steps (default: --scorer)");
  filt->add_option("--knn-k", l_knn)->check(CLI::PositiveNumber);
  filt->add_option("--bandwidth-margin", l_opts.bandwidth_margin);
  filt->add_option("--candidate-margin", l_opts.candidate_margin);
  filt->add_option("-o,--output", l_out, "Adjacency file");
  filt->add_option("--mesh-out", l_mesh, "Reconstructed OBJ");
  filt->add_option("--stats-out", l_stats, "Per-step JSON stats");
  add_common(filt, flc);
  filt->callback([&] {
    action = [&]() -> int {
      const Mesh src = read_obj(l_input);
      const Mesh m = normalize(src);
      const auto truth = adjacency_of(m);
      const auto initial = make_scorer(l_scorer, m.vertices, truth, l_knn);
      const auto refine = l_refine.empty() ? nullptr : make_scorer(l_refine, m.vertices, truth, l_knn);
      const auto r = filter_pipeline(*initial, refine ? *refine : *initial, l_opts);
      if (!l_out.empty()) write_text(l_out, write_adjacency(r.adjacency));
      if (!l_mesh.empty()) save_obj(mesh_from_adjacency(r.adjacency, src.vertices), l_mesh);
      const auto scores = adjacency_f1_recall(r.adjacency, truth);
      const ordered_json report{
          {"steps", steps_json(r)},
          {"edge_scores", {{"f1", scores.f1}, {"recall", scores.recall}, {"precision", scores.precision}}}};
      if (!l_stats.empty()) write_text(l_stats, report.dump(2) + "\n");
      if (flc.json) {
        out << report.dump(2) << "\n";
      } else {
        for (const auto& st : r.steps) {
          out << "step " << st.step << " [" << st.mask << "] candidates " << st.candidates << " edges "
              << st.edges << " faces " << st.faces << " bandwidth " << st.bandwidth << "\n";
        }
        out << "f1 " << scores.f1 << " recall " << scores.recall << " precision " << scores.precision << "\n";
      }
      return kExitOk;
    };
  });

  // filter-dataset (batch)
  Common dsc;
  std::string ds_manifest, ds_out;
  std::vector<std::string> ds_inputs;
  CorpusFilterOptions ds_opts;
  auto* fds = app.add_subcommand("filter-dataset", "Manifold, coplanar, size and duplicate screening");
  fds->add_option("inputs", ds_inputs, "Input OBJ files");
  fds->add_option("-m,--manifest", ds_manifest, "File listing one OBJ path per line");
  fds->add_option("--max-vertices", ds_opts.max_vertices, "Accept only V below this")->check(CLI::PositiveNumber);
  fds->add_option("--manifold-threshold", ds_opts.manifold_threshold)->check(CLI::Range(0.0, 1.0));
  fds->add_option("--coplanar-threshold", ds_opts.coplanar_threshold)->check(CLI::Range(0.0, 1.0));
  fds->add_option("-o,--out,--output", ds_out, "Write the JSON report here");
  add_common(fds, dsc);
  fds->callback([&] {
    action = [&]() -> int {
      const auto paths = expand_inputs(ds_inputs, ds_manifest);
      if (paths.empty()) throw UsageError("filter-dataset needs a manifest or inputs");
      const auto entries = filter_corpus(paths, ds_opts);
      const auto report = corpus_report_json(entries);
      if (!ds_out.empty()) write_text(ds_out, report);
      bool any_error = false;
      for (const auto& e : entries) {
        if (!e.error.empty()) {
          any_error = true;
          err << e.path << ": " << e.error << "\n";
        }
      }
      if (dsc.json) {
        out << report;
      } else {
        for (const auto& e : entries) {
          out << e.path << ": ";
          if (!e.verdict) {
            out << "error\n";
            continue;
          }
          if (e.verdict->accepted()) {
            out << "accepted\n";
            continue;
          }
          out << "rejected";
          for (auto r : e.verdict->reasons) out << ' ' << to_string(r);
          out << "\n";
        }
      }
      return any_error ? kExitData : kExitOk;
    };
  });

  // metrics
  Common mc;
  std::string m_a, m_b;
  std::size_t m_points = kDefaultSamplePoints;
  bool m_raw = false;
  auto* met = app.add_subcommand("metrics", "Chamfer and Hausdorff distance between two meshes");
  met->add_option("a", m_a, "First OBJ")->required();
  met->add_option("b", m_b, "Second OBJ")->required();
  met->add_option("--points", m_points)->check(CLI::PositiveNumber);
  met->add_flag("--no-normalize", m_raw, "Compare in the files' own frames");
  add_common(met, mc);
  met->callback([&] {
    action = [&]() -> int {
      const auto s = compare_meshes(read_obj(m_a), read_obj(m_b), {m_points, mc.seed, !m_raw});
      if (mc.json) {
        out << ordered_json{{"cd", s.cd}, {"hd", s.hd}}.dump() << "\n";
      } else {
        out << "cd " << s.cd << "\nhd " << s.hd << "\n";
      }
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "fastmesh 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace fastmesh::cli
