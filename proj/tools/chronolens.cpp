// chronolens: command-line entry point for the archive.
//
//   chronolens serve --data DIR [--port N] [--static DIR]
//   chronolens ingest --data DIR FILE...
//   chronolens query --data DIR "text" [--from YYYY-MM-DD] [--to YYYY-MM-DD] [--limit N]
//   chronolens bootstrap-ner --corpus FILE --gazetteer FILE [--out FILE]
//
// --data defaults to $CHRONOLENS_DATA.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "chronolens/api.hpp"
#include "chronolens/archive.hpp"
#include "chronolens/errors.hpp"
#include "chronolens/http_server.hpp"

namespace cl = chronolens;

namespace {

int run_bootstrap(const std::string& corpus_path, const std::string& gazetteer_path, const std::string& out,
                  cl::BootstrapOptions options) {
  std::vector<cl::IngestError> errors;
  const auto docs = cl::parse_jsonl(cl::text::read_file(corpus_path), errors);
  for (const auto& e : errors) std::cerr << "skipped: " << e.message << "\n";

  const auto segmenter = cl::Segmenter::with_defaults();
  std::vector<cl::NewsArticle> corpus;
  for (const auto& [line, raw] : docs) {
    try {
      corpus.push_back(cl::clean_article(raw, segmenter));
    } catch (const cl::Error& e) {
      std::cerr << "skipped line " << line << ": " << e.what() << "\n";
    }
  }
  const auto gaz = cl::Gazetteer::from_file(gazetteer_path);
  const auto result = cl::bootstrap(corpus, segmenter, gaz, options);
  for (const auto& it : result.trace) {
    std::printf("iteration %d: %zu PER tokens", it.iteration, it.per_tokens);
    if (it.agreement) std::printf(", agreement %.6f", *it.agreement);
    std::printf("\n");
  }
  std::printf("%s after %zu passes\n", result.stabilized ? "stabilized" : "not stabilized", result.trace.size());
  result.model.save(std::filesystem::path(out));
  std::printf("model written to %s\n", out.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"chronolens - entity-centric news archive"};
  app.require_subcommand(1);

  std::string data;
  auto add_data = [&](CLI::App* cmd) {
    cmd->add_option("--data", data, "Archive directory")->envname("CHRONOLENS_DATA")->required();
  };

  auto* serve = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  add_data(serve);
  int port = 8080;
  std::string host = "0.0.0.0";
  std::string static_dir;
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--static", static_dir, "Directory served under /")->check(CLI::ExistingDirectory);

  auto* ingest = app.add_subcommand("ingest", "Ingest JSON-lines corpus files");
  add_data(ingest);
  std::vector<std::string> files;
  ingest->add_option("files", files, "Corpus files (.jsonl)")->required()->check(CLI::ExistingFile);

  auto* query = app.add_subcommand("query", "Search entities");
  add_data(query);
  std::string text, from, to;
  std::size_t limit = 10;
  query->add_option("text", text, "Query text")->required();
  query->add_option("--from", from, "First day (YYYY-MM-DD)");
  query->add_option("--to", to, "Last day (YYYY-MM-DD)");
  query->add_option("--limit", limit, "Maximum number of results");

  auto* boot = app.add_subcommand("bootstrap-ner", "Bootstrap the person tagger from a gazetteer");
  std::string corpus, gazetteer, out = "model.tsv";
  cl::BootstrapOptions options;
  boot->add_option("--corpus", corpus, "Corpus (.jsonl)")->required()->check(CLI::ExistingFile);
  boot->add_option("--gazetteer", gazetteer, "Gazetteer file")->required()->check(CLI::ExistingFile);
  boot->add_option("--out", out, "Model output path");
  boot->add_option("--max-iters", options.max_iters, "Maximum self-training passes");
  boot->add_option("--epochs", options.train.epochs, "Perceptron epochs per pass");
  boot->add_option("--seed", options.train.seed, "Shuffling seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*boot) return run_bootstrap(corpus, gazetteer, out, options);

    std::filesystem::create_directories(data);
    cl::Archive archive{std::filesystem::path(data)};

    if (*ingest) {
      bool failed = false;
      for (const auto& f : files) {
        const auto report = archive.ingest_file(f);
        std::cout << f << ": " << report.to_json().dump() << "\n";
        failed = failed || !report.errors.empty();
      }
      return failed ? 2 : 0;
    }

    cl::Api api(archive);
    if (*query) {
      cl::QueryParams params{{"q", text}, {"limit", std::to_string(limit)}};
      if (!from.empty()) params["from"] = from;
      if (!to.empty()) params["to"] = to;
      const auto r = api.handle("GET", "/api/search", params);
      std::cout << r.body;
      return r.status == 200 ? 0 : 1;
    }

    cl::ServerOptions server{host, port, std::nullopt};
    if (!static_dir.empty()) server.static_dir = static_dir;
    std::cerr << "listening on " << host << ":" << port << "\n";
    if (!cl::serve(api, server)) {
      std::cerr << "cannot listen on " << host << ":" << port << "\n";
      return 1;
    }
    return 0;
  } catch (const cl::Error& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    return 1;
  }
}
