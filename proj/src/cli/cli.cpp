#include "oadino/cli.hpp"

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "oadino/error.hpp"

namespace oadino::cli {

namespace {

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--threads", c.threads, "Worker threads (0: OADINO_THREADS, else 1)");
  sub->add_flag("-v,--verbose", c.verbose, "Progress messages on standard error");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Object-aware retrieval pipeline: PCA segmentation, beta-VAE latents, patch similarity, evaluation"};
  app.name(args.empty() ? "oadino" : args[0]);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  Common common;
  GenSyntheticOptions gen;
  ImportOptions imp;
  SegmentOptions seg;
  ExtractOptions ext;
  MaskApplyOptions mask;
  TrainOptions train;
  EmbedOptions emb;
  RetrieveOptions ret;
  EvaluateOptions ev;
  ReportOptions rep;

  auto* s_gen = app.add_subcommand("gen-synthetic", "Generate a synthetic corpus with ground truth");
  s_gen->add_option("--out", gen.out, "Output directory")->required();
  s_gen->add_option("--seed", gen.seed, "Generator seed");
  s_gen->add_option("--n", gen.n, "Number of scenes");
  s_gen->add_option("--train", gen.train, "Training split size (-1: n/6)");
  s_gen->add_option("--queries", gen.queries, "Validation-query split size (-1: n/6)");
  s_gen->add_option("--grid", gen.grid, "Patch grid side");
  s_gen->add_option("--patch-px", gen.patch_px, "Pixels per patch side");
  s_gen->add_option("--dim", gen.dim, "Patch embedding dimension");
  s_gen->add_option("--objects-min", gen.objects_min, "Fewest objects per scene");
  s_gen->add_option("--objects-max", gen.objects_max, "Most objects per scene");
  s_gen->add_option("--colour-weight", gen.colour_weight, "Colour salience in patch embeddings");
  s_gen->add_option("--geometry-weight", gen.geometry_weight, "Shape, size and material salience");
  s_gen->add_option("--marker", gen.marker, "Background marker weight");
  s_gen->add_option("--noise", gen.noise, "Embedding noise standard deviation");
  add_common(s_gen, common);

  auto* s_imp = app.add_subcommand("import", "Build a manifest from directories of exported files");
  s_imp->add_option("--images", imp.images, "Directory of <id>.ppm images")->required();
  s_imp->add_option("--embeddings", imp.embeddings, "Directory of <id>.oadf patch embeddings")->required();
  s_imp->add_option("--globals", imp.globals, "Directory of <id>.oadf global features");
  s_imp->add_option("--annotations", imp.annotations, "Annotation JSONL file");
  s_imp->add_option("--split", imp.split, "train, validation-query or candidates");
  s_imp->add_option("--out", imp.out, "Manifest to write")->required();
  add_common(s_imp, common);

  auto* s_seg = app.add_subcommand("segment", "Two-pass PCA foreground masks per batch of t images");
  s_seg->add_option("--manifest", seg.manifests, "Manifest(s) to segment")->required();
  s_seg->add_option("--out", seg.out, "Output directory")->required();
  s_seg->add_option("--t", seg.t, "Images per PCA batch");
  s_seg->add_flag("--visualize", seg.visualize, "Also write mask PPMs");
  add_common(s_seg, common);

  auto* s_ext = app.add_subcommand("extract-patches", "Crop foreground patches and resize them to 64x64");
  s_ext->add_option("--manifest", ext.manifests, "Manifest(s)")->required();
  s_ext->add_option("--masks", ext.masks, "Directory of <id>.oamk masks")->required();
  s_ext->add_option("--out", ext.out, "Output directory for patch tensors")->required();
  add_common(s_ext, common);

  auto* s_mask = app.add_subcommand("mask-apply", "Write background-masked images for global feature export");
  s_mask->add_option("--manifest", mask.manifests, "Manifest(s)")->required();
  s_mask->add_option("--masks", mask.masks, "Directory of <id>.oamk masks")->required();
  s_mask->add_option("--out", mask.out, "Output directory")->required();
  add_common(s_mask, common);

  auto* s_train = app.add_subcommand("train-vae", "Train the beta-VAE on extracted patches");
  s_train->add_option("--patches", train.patches, "Directory of patch tensors")->required();
  s_train->add_option("--manifest", train.manifest, "Use only the images of this manifest");
  s_train->add_option("--out", train.out, "Output directory")->required();
  s_train->add_option("--epochs", train.epochs, "Epochs");
  s_train->add_option("--batch", train.batch, "Minibatch size");
  s_train->add_option("--lr", train.lr, "Learning rate");
  s_train->add_option("--beta", train.beta, "KL weight");
  s_train->add_option("--latent", train.latent, "Latent size");
  s_train->add_option("--seed", train.seed, "Initialisation, shuffling and noise seed");
  s_train->add_option("--max-patches", train.max_patches, "Use at most this many patches (0: all)");
  add_common(s_train, common);

  auto* s_emb = app.add_subcommand("embed", "Build joint [global, latent] or global-only representations");
  s_emb->add_option("--manifest", emb.manifests, "Manifest(s)")->required();
  s_emb->add_option("--patches", emb.patches, "Directory of patch tensors (joint mode)");
  s_emb->add_option("--masks", emb.masks, "Mask directory; patches are cut on the fly instead of read");
  s_emb->add_option("--model", emb.model, "VAE checkpoint (joint mode)");
  s_emb->add_option("--out", emb.out, "Output directory")->required();
  s_emb->add_option("--mode", emb.mode, "joint or global")->check(CLI::IsMember({"joint", "global"}));
  add_common(s_emb, common);

  auto* s_ret = app.add_subcommand("retrieve", "Rank candidates for each query");
  s_ret->add_option("--query-manifest", ret.query_manifest, "Query manifest")->required();
  s_ret->add_option("--candidate-manifest", ret.candidate_manifest, "Candidate manifest")->required();
  s_ret->add_option("--reps", ret.reps, "Representation directory from embed")->required();
  s_ret->add_option("--out", ret.out, "Output directory for ranked CSVs")->required();
  s_ret->add_option("--query", ret.queries, "Restrict to these query ids");
  add_common(s_ret, common);

  auto* s_ev = app.add_subcommand("evaluate", "Run the multi-trial attribute retrieval protocol");
  s_ev->add_option("--query-manifest", ev.query_manifest, "Query manifest")->required();
  s_ev->add_option("--candidate-manifest", ev.candidate_manifest, "Candidate manifest")->required();
  s_ev->add_option("--reps", ev.reps, "Representation directory from embed")->required();
  s_ev->add_option("--out", ev.out, "Output directory")->required();
  s_ev->add_option("--masks", ev.masks, "Mask directory; enables colour distance");
  s_ev->add_option("--k", ev.k, "Cut-off rank");
  s_ev->add_option("--trials", ev.trials, "Number of trials");
  s_ev->add_option("--queries", ev.queries, "Queries per trial");
  s_ev->add_option("--candidates", ev.candidates, "Candidate pool size");
  s_ev->add_option("--seed", ev.seed, "Base seed (trial i uses seed + i)");
  s_ev->add_option("--families", ev.families, "Subset families (S D M C P1 P2 P3 P1+C P2+C P3+C or letter sets)");
  s_ev->add_option("--base", ev.base, "Attribute base set for P<i> families");
  s_ev->add_option("--contact-sheets", ev.contact_sheets, "Contact sheets for the first queries of trial 0");
  add_common(s_ev, common);

  auto* s_rep = app.add_subcommand("report", "Print the summary of an evaluation report");
  s_rep->add_option("--report", rep.report, "report.json")->required();
  s_rep->add_option("--baseline", rep.baseline, "Second report to compare against");
  s_rep->add_option("--format", rep.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));
  add_common(s_rep, common);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, std::cout, std::cerr);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*s_gen) gen_synthetic(gen, common);
    else if (*s_imp) import_files(imp, common);
    else if (*s_seg) segment(seg, common);
    else if (*s_ext) extract_patches(ext, common);
    else if (*s_mask) mask_apply(mask, common);
    else if (*s_train) train_vae(train, common);
    else if (*s_emb) embed(emb, common);
    else if (*s_ret) retrieve(ret, common);
    else if (*s_ev) evaluate(ev, common);
    else if (*s_rep) report(rep, common);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc)); }

}  // namespace oadino::cli
