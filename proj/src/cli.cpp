#include "appsteg/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "appsteg/datagen.hpp"
#include "appsteg/embedders.hpp"
#include "appsteg/ensemble.hpp"
#include "appsteg/evaluate.hpp"
#include "appsteg/feature_io.hpp"
#include "appsteg/parallel.hpp"
#include "appsteg/prng.hpp"
#include "appsteg/sigdetect.hpp"
#include "appsteg/signature_config.hpp"

namespace appsteg {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Bad flag combinations found after parsing; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  int threads = default_threads();
  std::string sigs_path;
};

SignatureTable signatures(const Common& c) {
  return c.sigs_path.empty() ? SignatureTable::defaults() : load_signature_config(c.sigs_path);
}

ordered_json common_json(const std::string& command, const Common& c) {
  return {{"command", command}, {"seed", c.seed}, {"threads", c.threads}, {"sigs", c.sigs_path}};
}

void print_config(const ordered_json& j) { std::cout << j.dump() << '\n' << std::flush; }

std::string dump(const ordered_json& j) { return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace); }

AppId app_arg(const std::string& name) {
  const auto app = parse_app(name);
  if (!app) throw UsageError("unknown app '" + name + "'");
  return *app;
}

Bytes read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, std::span<const std::uint8_t> data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

/// Inline JSON when the argument starts with '{', otherwise a file path.
nlohmann::json json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return nlohmann::json::parse(arg);
  std::ifstream in(arg);
  if (!in) throw std::runtime_error("cannot read " + arg);
  return nlohmann::json::parse(in);
}

std::string as_text(const Bytes& b) { return std::string(b.begin(), b.end()); }

Channels channels_of(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    switch (j.get<int>()) {
      case 1: return Channels::Gray;
      case 3: return Channels::RGB;
      case 4: return Channels::RGBA;
    }
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "gray") return Channels::Gray;
    if (s == "rgb") return Channels::RGB;
    if (s == "rgba") return Channels::RGBA;
  }
  throw std::invalid_argument("channels must be 1, 3, 4, \"gray\", \"rgb\" or \"rgba\"");
}

/// Synthetic class from a JSON spec; "class" picks smooth or noisy defaults
/// which explicit noise_sigma / smoothing_passes override.
SynthSpec synth_spec(const nlohmann::json& j, std::uint64_t seed) {
  SynthSpec s;
  s.count = j.at("count").get<int>();
  s.width = j.at("width").get<int>();
  s.height = j.value("height", s.width);
  s.channels = channels_of(j.value("channels", nlohmann::json(3)));
  const std::string cls = j.value("class", "smooth");
  if (cls == "smooth") s = smooth_class(s.count, s.width, s.height, s.channels, seed);
  else if (cls == "noisy") s = noisy_class(s.count, s.width, s.height, s.channels, seed);
  else throw std::invalid_argument("class must be smooth or noisy");
  s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
  s.smoothing_radius = j.value("smoothing_passes", s.smoothing_radius);
  return s;
}

ordered_json synth_json(const SynthSpec& s) {
  return {{"count", s.count},         {"width", s.width},
          {"height", s.height},       {"channels", channel_count(s.channels)},
          {"noise_sigma", s.noise_sigma}, {"smoothing_passes", s.smoothing_radius},
          {"seed", s.seed}};
}

ordered_json detection_json(const std::string& image, AppId app, const DetectionResult& r) {
  ordered_json j = {{"image", image}, {"detector", std::string(to_string(app))}, {"verdict", r.verdict}};
  j["matched_at_bit"] = r.matched_at_bit ? ordered_json(*r.matched_at_bit) : ordered_json(nullptr);
  j["recovered_message"] = r.recovered_message ? ordered_json(as_text(*r.recovered_message)) : ordered_json(nullptr);
  j["recovered_password"] = r.recovered_password ? ordered_json(as_text(*r.recovered_password)) : ordered_json(nullptr);
  return j;
}

std::vector<fs::path> png_inputs(const fs::path& in) {
  if (fs::is_regular_file(in)) return {in};
  if (!fs::is_directory(in)) throw std::runtime_error("no such file or directory: " + in.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(in))
    if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

TrainParams train_params(const nlohmann::json& j, const Common& c) {
  TrainParams p;
  p.seed = c.seed;
  p.threads = c.threads;
  if (j.contains("n_learners")) p.n_learners = j["n_learners"].get<int>();
  if (j.contains("d_sub")) p.d_sub = j["d_sub"].get<int>();
  if (j.contains("lambda")) p.lambda = j["lambda"].get<double>();
  return p;
}

SplitSpec split_spec(const nlohmann::json& j, std::uint64_t seed) {
  SplitSpec s;
  s.n_train_pairs = j.at("n_train_pairs").get<int>();
  s.n_test_pairs = j.at("n_test_pairs").get<int>();
  s.repetitions = j.value("repetitions", 1);
  s.seed = seed;
  return s;
}

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Stego-app embedding, signature detection and ML steganalysis workbench", "appsteg"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Master seed for all randomness");
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--sigs", common.sigs_path, "Signature config file")->check(CLI::ExistingFile);

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "Embed a message into a cover PNG");
  std::string e_app, e_in, e_msg_file, e_msg, e_password, e_out;
  int e_blocks = 1;
  embed_cmd->add_option("--app", e_app)->required();
  embed_cmd->add_option("--in", e_in)->required()->check(CLI::ExistingFile);
  auto* msg_file_opt = embed_cmd->add_option("--msg-file", e_msg_file)->check(CLI::ExistingFile);
  embed_cmd->add_option("--msg", e_msg)->excludes(msg_file_opt);
  embed_cmd->add_option("--password", e_password);
  embed_cmd->add_option("--out", e_out)->required();
  embed_cmd->add_option("--blocks", e_blocks, "MobiStego block count")->check(CLI::PositiveNumber);

  // extract
  auto* extract_cmd = app.add_subcommand("extract", "Recover a message from a stego PNG");
  std::string x_app, x_in, x_password, x_out;
  int x_blocks = 1;
  extract_cmd->add_option("--app", x_app)->required();
  extract_cmd->add_option("--in", x_in)->required()->check(CLI::ExistingFile);
  extract_cmd->add_option("--password", x_password);
  extract_cmd->add_option("--out", x_out, "Write the message bytes here");
  extract_cmd->add_option("--blocks", x_blocks, "MobiStego block count")->check(CLI::PositiveNumber);

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Signature-based detection over PNG files");
  std::vector<std::string> d_apps;
  bool d_all = false, d_printable = false;
  std::string d_in, d_report;
  auto* d_app_opt = detect_cmd->add_option("--app", d_apps);
  detect_cmd->add_flag("--all", d_all)->excludes(d_app_opt);
  detect_cmd->add_option("--in", d_in, "PNG file or directory")->required();
  detect_cmd->add_option("--report", d_report, "JSONL output (default stdout)");
  detect_cmd->add_flag("--printable-only", d_printable, "PocketStego: require printable text");

  // gen-dataset
  auto* gen_cmd = app.add_subcommand("gen-dataset", "Batch cover/stego generation");
  std::string g_config;
  bool g_verify = false;
  gen_cmd->add_option("--config", g_config, "JSON config (file or inline)")->required();
  gen_cmd->add_flag("--verify", g_verify, "Re-extract every stego after generation");

  // synth-covers
  auto* synth_cmd = app.add_subcommand("synth-covers", "Write synthetic cover PNGs");
  std::string s_spec, s_out;
  synth_cmd->add_option("--spec", s_spec, "JSON spec (file or inline)")->required();
  synth_cmd->add_option("--out", s_out)->required();

  // features
  auto* feat_cmd = app.add_subcommand("features", "Extract srm_mini features for a manifest");
  std::string f_manifest, f_out, f_app;
  feat_cmd->add_option("--manifest", f_manifest)->required()->check(CLI::ExistingFile);
  feat_cmd->add_option("--out", f_out)->required();
  feat_cmd->add_option("--app", f_app, "Only this app's records");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train an FLD ensemble");
  std::string t_features, t_model;
  std::optional<int> t_learners, t_dsub;
  std::optional<double> t_lambda;
  train_cmd->add_option("--features", t_features)->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--model", t_model)->required();
  train_cmd->add_option("--learners", t_learners);
  train_cmd->add_option("--d-sub", t_dsub);
  train_cmd->add_option("--lambda", t_lambda);

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Classify feature rows with a trained model");
  std::string p_model, p_features;
  predict_cmd->add_option("--model", p_model)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--features", p_features)->required()->check(CLI::ExistingFile);

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Rate-grid or source-mismatch experiments");
  std::string v_grid, v_mismatch, v_out, v_csv;
  auto* grid_opt = eval_cmd->add_option("--grid", v_grid, "Rate-grid config JSON");
  eval_cmd->add_option("--mismatch", v_mismatch, "Source-mismatch config JSON")->excludes(grid_opt);
  eval_cmd->add_option("--out", v_out, "Also write the JSON report here");
  eval_cmd->add_option("--csv", v_csv, "Grid only: p_e table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (embed_cmd->parsed()) {
      const AppId a = app_arg(e_app);
      const SignatureTable sigs = signatures(common);
      ordered_json cfg = common_json("embed", common);
      cfg.update({{"app", std::string(to_string(a))}, {"in", e_in}, {"msg_file", e_msg_file},
                  {"password", e_password}, {"out", e_out}, {"blocks", e_blocks}});
      print_config(cfg);
      const Bytes message = e_msg_file.empty() ? to_bytes(e_msg) : read_file(e_msg_file);
      const Bytes pwd = to_bytes(e_password);
      const PixelImage cover = make_cover(a, read_png_file(e_in));
      const PayloadBits payload = build_payload(a, message, pwd, sigs);
      const EmbedResult r = embed(a, cover, payload, pwd, EmbedOptions{e_blocks});
      write_png_file(e_out, r.stego);
      const std::size_t cap = capacity_bits(a, cover);
      std::cout << ordered_json{{"out", e_out},
                                {"message_bytes", message.size()},
                                {"payload_bits", payload.len_bits()},
                                {"capacity_bits", cap},
                                {"rate", static_cast<double>(payload.len_bits()) / static_cast<double>(cap)},
                                {"change_rate", r.change_rate}}
                       .dump()
                << '\n';
      return kExitOk;
    }

    if (extract_cmd->parsed()) {
      const AppId a = app_arg(x_app);
      const SignatureTable sigs = signatures(common);
      ordered_json cfg = common_json("extract", common);
      cfg.update({{"app", std::string(to_string(a))}, {"in", x_in}, {"password", x_password},
                  {"out", x_out}, {"blocks", x_blocks}});
      print_config(cfg);
      const auto got = extract_message(a, read_png_file(x_in), to_bytes(x_password), sigs, EmbedOptions{x_blocks});
      if (!got) {
        std::cout << ordered_json{{"found", false}}.dump() << '\n';
        std::cerr << "no payload found\n";
        return kExitData;
      }
      if (!x_out.empty()) write_file(x_out, got->message);
      ordered_json j = {{"found", true}, {"message_bytes", got->message.size()}, {"message", as_text(got->message)}};
      j["password"] = got->password ? ordered_json(as_text(*got->password)) : ordered_json(nullptr);
      std::cout << dump(j) << '\n';
      return kExitOk;
    }

    if (detect_cmd->parsed()) {
      if (!d_all && d_apps.empty()) throw UsageError("detect needs --app or --all");
      std::vector<AppId> apps;
      if (d_all) apps.assign(kDetectableApps.begin(), kDetectableApps.end());
      for (const auto& name : d_apps) apps.push_back(app_arg(name));
      for (AppId a : apps)
        if (std::find(kDetectableApps.begin(), kDetectableApps.end(), a) == kDetectableApps.end())
          throw UsageError(std::string(to_string(a)) + " has no signature detector");
      const SignatureTable sigs = signatures(common);
      ordered_json cfg = common_json("detect", common);
      ordered_json names = ordered_json::array();
      for (AppId a : apps) names.push_back(std::string(to_string(a)));
      cfg.update({{"apps", names}, {"in", d_in}, {"report", d_report}, {"printable_only", d_printable}});
      print_config(cfg);

      const auto files = png_inputs(d_in);
      const DetectOptions opts{d_printable};
      std::vector<std::vector<std::string>> lines(files.size());
      std::vector<std::string> errors(files.size());
      parallel_for(files.size(), common.threads, [&](std::size_t i) {
        const std::string rel = fs::is_directory(d_in) ? fs::relative(files[i], d_in).generic_string()
                                                       : files[i].generic_string();
        try {
          const PixelImage img = read_png_file(files[i]);
          for (AppId a : apps) lines[i].push_back(dump(detection_json(rel, a, detect(a, img, sigs, opts))));
        } catch (const std::exception& e) {
          errors[i] = rel + ": " + e.what();
        }
      });

      std::map<std::string, std::size_t> flagged;
      std::ofstream report;
      if (!d_report.empty()) {
        if (fs::path(d_report).has_parent_path()) fs::create_directories(fs::path(d_report).parent_path());
        report.open(d_report, std::ios::trunc);
        if (!report) throw std::runtime_error("cannot write " + d_report);
      }
      std::ostream& out = d_report.empty() ? std::cout : report;
      for (const auto& per_file : lines)
        for (const auto& l : per_file) {
          out << l << '\n';
          const auto j = nlohmann::json::parse(l);
          if (j["verdict"].get<bool>()) ++flagged[j["detector"].get<std::string>()];
        }
      std::size_t failed = 0;
      for (const auto& e : errors)
        if (!e.empty()) {
          std::cerr << "skipped " << e << '\n';
          ++failed;
        }
      ordered_json summary = {{"images", files.size()}, {"unreadable", failed}};
      for (AppId a : apps) summary["flagged"][std::string(to_string(a))] = flagged[std::string(to_string(a))];
      if (!d_report.empty()) std::cout << summary.dump() << '\n';
      else std::cerr << summary.dump() << '\n';
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      const nlohmann::json j = json_arg(g_config);
      GenConfig gc;
      gc.master_seed = common.seed;
      gc.threads = common.threads;
      gc.sigs = signatures(common);
      gc.output_dir = j.at("output_dir").get<std::string>();
      for (const auto& name : j.at("apps")) gc.apps.push_back(app_arg(name.get<std::string>()));
      gc.rates = j.at("rates").get<std::vector<double>>();
      gc.dictionary = j.contains("dictionary") ? read_file(j["dictionary"].get<std::string>()) : default_dictionary();
      if (j.contains("password") && !j["password"].is_null()) gc.password.fixed = j["password"].get<std::string>();
      gc.password.random_length = j.value("password_length", 8);
      gc.embed.mobistego_blocks = j.value("mobistego_blocks", 1);

      ordered_json cfg = common_json("gen-dataset", common);
      cfg["output_dir"] = gc.output_dir.string();
      cfg["apps"] = j.at("apps");
      cfg["rates"] = gc.rates;
      cfg["password"] = opt_json(gc.password.fixed);
      cfg["password_length"] = gc.password.random_length;
      cfg["mobistego_blocks"] = gc.embed.mobistego_blocks;
      cfg["dictionary"] = j.value("dictionary", "");
      if (j.contains("covers_dir")) {
        cfg["covers_dir"] = j["covers_dir"];
        gc.sources = sources_from_directory(j["covers_dir"].get<std::string>());
      } else if (j.contains("synth")) {
        const SynthSpec s = synth_spec(j["synth"], mix_seed(common.seed, 0x5a17));
        cfg["synth"] = synth_json(s);
        cfg["synth"]["class"] = j["synth"].value("class", "smooth");
        gc.sources = sources_from_images(synth_covers(s), j["synth"].value("prefix", "synth_"));
      } else {
        throw std::invalid_argument("config needs covers_dir or synth");
      }
      cfg["verify"] = g_verify;
      print_config(cfg);

      const GenReport rep = generate_dataset(gc);
      std::size_t stegos = 0;
      for (const auto& r : rep.manifest.records) stegos += r.role == Role::Stego;
      ordered_json summary = {{"manifest", (gc.output_dir / "manifest.jsonl").string()},
                              {"records", rep.manifest.records.size()},
                              {"stegos", stegos},
                              {"skipped", rep.skipped.size()}};
      const auto problems = check_manifest(rep.manifest, gc.sigs);
      for (const auto& p : problems) std::cerr << "manifest check: " << p << '\n';
      summary["manifest_problems"] = problems.size();
      int rc = problems.empty() ? kExitOk : kExitData;
      if (g_verify) {
        const VerifyReport v = verify_dataset(rep.manifest, gc.dictionary, gc.sigs, gc.embed, gc.threads);
        for (const auto& f : v.failures) std::cerr << "verify: " << f << '\n';
        summary["verified"] = v.checked;
        summary["verify_failures"] = v.failures.size();
        if (!v.failures.empty()) rc = kExitData;
      }
      std::cout << summary.dump() << '\n';
      return rc;
    }

    if (synth_cmd->parsed()) {
      const SynthSpec s = synth_spec(json_arg(s_spec), common.seed);
      ordered_json cfg = common_json("synth-covers", common);
      cfg["spec"] = synth_json(s);
      cfg["out"] = s_out;
      print_config(cfg);
      std::vector<std::string> written(static_cast<std::size_t>(std::max(0, s.count)));
      parallel_for(written.size(), common.threads, [&](std::size_t i) {
        char name[32];
        std::snprintf(name, sizeof(name), "synth_%05zu.png", i);
        write_png_file(fs::path(s_out) / name, synth_cover(s, static_cast<int>(i)));
        written[i] = name;
      });
      std::cout << ordered_json{{"out", s_out}, {"written", written.size()}}.dump() << '\n';
      return kExitOk;
    }

    if (feat_cmd->parsed()) {
      std::optional<AppId> only;
      if (!f_app.empty()) only = app_arg(f_app);
      ordered_json cfg = common_json("features", common);
      cfg.update({{"manifest", f_manifest}, {"out", f_out}, {"app", f_app}});
      print_config(cfg);
      const FeatureTable t = features_from_manifest(read_manifest(f_manifest), only, common.threads);
      write_feature_csv(f_out, t);
      std::cout << ordered_json{{"out", f_out}, {"rows", t.ids.size()}, {"dim", t.rows.cols()}}.dump() << '\n';
      return kExitOk;
    }

    if (train_cmd->parsed()) {
      TrainParams p;
      p.seed = common.seed;
      p.threads = common.threads;
      p.n_learners = t_learners;
      p.d_sub = t_dsub;
      p.lambda = t_lambda;
      ordered_json cfg = common_json("train", common);
      cfg.update({{"features", t_features}, {"model", t_model}, {"learners", opt_json(t_learners)},
                  {"d_sub", opt_json(t_dsub)}, {"lambda", opt_json(t_lambda)}});
      print_config(cfg);
      const FeatureTable t = read_feature_csv(t_features);
      for (int l : t.labels)
        if (l != 0 && l != 1) throw std::invalid_argument("training rows need labels 0 or 1");
      const EnsembleModel m = train(t.rows, t.labels, p);
      save_model(t_model, m);
      std::cout << ordered_json{{"model", t_model}, {"learners", m.learners.size()}, {"d_sub", m.d_sub},
                                {"oob_error", m.oob_error}}
                       .dump()
                << '\n';
      return kExitOk;
    }

    if (predict_cmd->parsed()) {
      ordered_json cfg = common_json("predict", common);
      cfg.update({{"model", p_model}, {"features", p_features}});
      print_config(cfg);
      const EnsembleModel m = load_model(p_model);
      const FeatureTable t = read_feature_csv(p_features);
      const std::vector<int> pred = predict(m, t.rows);
      bool labeled = !t.labels.empty();
      for (std::size_t i = 0; i < pred.size(); ++i) {
        std::cout << ordered_json{{"id", t.ids[i]}, {"prediction", pred[i]}}.dump() << '\n';
        labeled = labeled && t.labels[i] >= 0;
      }
      if (labeled) std::cout << "{\"summary\":" << report_to_json(p_e(t.labels, pred)) << "}\n";
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      if (v_grid.empty() == v_mismatch.empty()) throw UsageError("evaluate needs exactly one of --grid or --mismatch");
      const nlohmann::json j = json_arg(v_grid.empty() ? v_mismatch : v_grid);
      const AppId a = app_arg(j.at("app").get<std::string>());
      const SplitSpec split = split_spec(j, common.seed);
      const TrainParams params = train_params(j, common);
      ordered_json cfg = common_json("evaluate", common);
      cfg["mode"] = v_grid.empty() ? "mismatch" : "grid";
      cfg["app"] = std::string(to_string(a));
      cfg["n_train_pairs"] = split.n_train_pairs;
      cfg["n_test_pairs"] = split.n_test_pairs;
      cfg["repetitions"] = split.repetitions;
      cfg["n_learners"] = opt_json(params.n_learners);
      cfg["d_sub"] = opt_json(params.d_sub);
      cfg["lambda"] = opt_json(params.lambda);
      cfg["out"] = v_out;

      std::string result;
      if (!v_grid.empty()) {
        const auto train_rates = j.at("train_rates").get<std::vector<double>>();
        const auto test_rates = j.at("test_rates").get<std::vector<double>>();
        cfg.update({{"manifest", j.at("manifest")}, {"train_rates", train_rates}, {"test_rates", test_rates},
                    {"csv", v_csv}});
        print_config(cfg);
        const RateGrid grid = run_rate_grid(read_manifest(j.at("manifest").get<std::string>()), a, train_rates,
                                            test_rates, split, params);
        result = grid_to_json(grid);
        const std::string csv = grid_to_csv(grid);
        std::cerr << csv;
        if (!v_csv.empty()) write_file(v_csv, to_bytes(csv));
      } else {
        if (!v_csv.empty()) throw UsageError("--csv applies to --grid only");
        const double rate = j.at("rate").get<double>();
        std::map<std::string, DatasetManifest> manifests;
        for (const auto& [name, path] : j.at("manifests").items())
          manifests[name] = read_manifest(path.get<std::string>());
        cfg.update({{"manifests", j.at("manifests")}, {"rate", rate}});
        print_config(cfg);
        result = mismatch_to_json(run_source_mismatch(manifests, a, rate, split, params));
      }
      if (!v_out.empty()) write_file(v_out, to_bytes(result + "\n"));
      std::cout << result << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace appsteg
