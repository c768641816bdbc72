// cybok command-line front end.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cybok/corpus.hpp"
#include "cybok/error.hpp"
#include "cybok/fetch.hpp"
#include "cybok/index.hpp"
#include "cybok/model.hpp"
#include "cybok/report.hpp"
#include "cybok/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "cybok: warning: " << w << "\n";
}

// SOURCE_DATE_EPOCH pins the snapshot timestamp for reproducible builds.
std::string ingest_timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::stoll(epoch));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<cybok::Database> parse_db_list(const std::string& list) {
    std::vector<cybok::Database> dbs;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) dbs.push_back(cybok::database_from_string(item));
    }
    return dbs;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        cybok::write_file(path, text);
    }
}

struct Loaded {
    cybok::SystemModel model;
    cybok::CorpusSnapshot snapshot;
    cybok::SearchIndex index;
};

Loaded load_inputs(const std::string& model_path, const std::string& index_dir, const std::string& snapshot_dir) {
    Loaded in;
    in.model = cybok::load_graphml(cybok::read_file(model_path));
    in.snapshot = cybok::load_snapshot(snapshot_dir.empty() ? index_dir : snapshot_dir);
    in.index = cybok::load_index(index_dir, in.snapshot);
    return in;
}

std::vector<cybok::TableRow> table_from_report(const json& report) {
    std::vector<cybok::TableRow> rows;
    for (const auto& r : report.at("table")) {
        rows.push_back({cybok::parse_element_ref(r.at("element").get<std::string>()),
                        r.at("element_name").get<std::string>(), r.at("attack_vector").get<std::string>(),
                        r.at("description").get<std::string>(), r.value("derived", false)});
    }
    return rows;
}

cybok::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cybok - model-based vulnerability exploration"};
    app.require_subcommand(1);

    // update
    std::string store = "cybok-data/sources", offline_dir, config_path, db_list;
    auto* update = app.add_subcommand("update", "Fetch CAPEC/CWE/CVE sources into the source store");
    update->add_option("--store", store, "Directory receiving the raw source files")->capture_default_str();
    update->add_option("--offline-dir", offline_dir, "Copy capec.xml/cwe.xml/cve.json from this directory");
    update->add_option("--config", config_path, "JSON file mapping capec/cwe/cve to a URL or path");
    update->add_option("--db", db_list, "Comma-separated subset of capec,cwe,cve");

    // snapshot
    std::string sources_dir = "cybok-data/sources", snapshot_out;
    auto* snapshot = app.add_subcommand("snapshot", "Parse fetched sources into a corpus snapshot");
    snapshot->add_option("--sources", sources_dir, "Source store written by `update`")->capture_default_str();
    snapshot->add_option("--out", snapshot_out, "Snapshot directory")->required();

    // index
    std::string index_snapshot, index_out;
    auto* index = app.add_subcommand("index", "Build the search index for a snapshot");
    index->add_option("--snapshot", index_snapshot, "Snapshot directory")->required();
    index->add_option("--out", index_out, "Index directory (default: the snapshot directory)");

    // validate
    std::string model_path;
    auto* validate = app.add_subcommand("validate", "Check a GraphML system model");
    validate->add_option("--model", model_path, "GraphML model")->required();

    // analyze / surface / chains share inputs
    std::string index_dir, snapshot_dir, out_path, target;
    std::size_t max_len = cybok::kDefaultMaxPathLength;
    bool print_table = false;
    auto add_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_path, "GraphML model")->required();
        cmd->add_option("--index", index_dir, "Index directory")->required();
        cmd->add_option("--snapshot", snapshot_dir, "Snapshot directory (default: the index directory)");
    };
    auto* analyze = app.add_subcommand("analyze", "Associate, compute the attack surface, chains and rollup");
    add_inputs(analyze);
    analyze->add_option("--out", out_path, "Report file (default: stdout)");
    analyze->add_option("--target", target, "Asset id to compute exploit chains towards");
    analyze->add_option("--max-len", max_len, "Maximum chain length in edges")->capture_default_str();
    analyze->add_flag("--table", print_table, "Also print the results table to stderr");

    auto* surface = app.add_subcommand("surface", "Print the attack surface");
    add_inputs(surface);

    auto* chains = app.add_subcommand("chains", "Print exploit chains towards a target");
    add_inputs(chains);
    chains->add_option("--target", target, "Target asset id")->required();
    chains->add_option("--max-len", max_len, "Maximum chain length in edges")->capture_default_str();

    // render
    std::string report_path, kind_name;
    std::optional<std::size_t> chain_index;
    auto* render = app.add_subcommand("render", "Render topology, surface or chains as Graphviz DOT");
    render->add_option("--model", model_path, "GraphML model")->required();
    render->add_option("--report", report_path, "Report from `analyze` (not needed for topology)");
    render->add_option("--kind", kind_name, "topology|surface|chains")->required();
    render->add_option("--chain", chain_index, "Only this chain (0-based)");
    render->add_option("--out", out_path, "DOT file (default: stdout)");

    // table
    auto* table = app.add_subcommand("table", "Print the results table of a report");
    table->add_option("--report", report_path, "Report from `analyze`")->required();

    // serve
    int port = 8080;
    std::string host = "127.0.0.1", static_dir;
    auto* serve = app.add_subcommand("serve", "Serve the analysis API (and optionally the web UI)");
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--index", index_dir, "Index directory")->required();
    serve->add_option("--snapshot", snapshot_dir, "Snapshot directory (default: the index directory)");
    serve->add_option("--static", static_dir, "Directory with the built web UI");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*update) {
            cybok::CorpusConfig config;
            if (!config_path.empty()) {
                config = cybok::CorpusConfig::from_json(cybok::read_file(config_path));
            } else if (!offline_dir.empty()) {
                config = cybok::CorpusConfig::from_offline_dir(offline_dir);
            } else {
                throw cybok::InvalidArgument("update needs --offline-dir or --config");
            }
            if (!db_list.empty()) config = config.restricted_to(parse_db_list(db_list));
            const auto report = cybok::fetch_sources(config, store);
            for (const auto& s : report.sources) {
                std::cout << cybok::to_string(s.database) << "\t" << s.stored_path.string() << "\t"
                          << (s.version.empty() ? "unversioned" : s.version) << "\t" << s.bytes << " bytes"
                          << (s.from_network ? "" : " (local)") << "\n";
            }
        } else if (*snapshot) {
            const auto fetched = cybok::load_fetch_report(sources_dir);
            std::vector<cybok::AttackVectorEntry> entries;
            std::map<cybok::Database, std::string> versions;
            for (const auto& s : fetched.sources) {
                auto parsed = cybok::parse_source(s.database, cybok::read_file(s.stored_path));
                warn(parsed.warnings);
                versions[s.database] = parsed.version;
                entries.insert(entries.end(), parsed.entries.begin(), parsed.entries.end());
            }
            auto built = cybok::build_snapshot(std::move(entries), std::move(versions), ingest_timestamp());
            warn(built.warnings);
            cybok::save_snapshot(built.snapshot, snapshot_out);
            std::cout << "snapshot " << built.snapshot.corpus_ref() << ": " << built.snapshot.entries.size()
                      << " entries\n";
        } else if (*index) {
            const auto snap = cybok::load_snapshot(index_snapshot);
            const auto idx = cybok::build_index(snap);
            cybok::save_index(idx, index_out.empty() ? index_snapshot : index_out);
            std::cout << "index " << idx.corpus_ref() << ": " << idx.doc_count() << " documents, "
                      << idx.token_count() << " tokens\n";
        } else if (*validate) {
            const auto model = cybok::load_graphml(cybok::read_file(model_path));
            std::cout << model_path << ": ok (" << model.assets.size() << " assets, " << model.edges.size()
                      << " edges)\n";
        } else if (*analyze) {
            const auto in = load_inputs(model_path, index_dir, snapshot_dir);
            cybok::AnalysisOptions options;
            if (!target.empty()) options.target = target;
            options.max_len = max_len;
            const auto result = cybok::run_analysis(in.model, in.snapshot, in.index, options);
            warn(result.rollup.warnings);
            write_output(out_path, cybok::render_report(in.model, in.snapshot, result));
            if (print_table) {
                std::cerr << cybok::emit_results_table(
                    cybok::results_table(in.model, result.evidence, result.rollup, in.snapshot));
            }
            if (result.chains && result.chains->truncated) {
                std::cerr << "cybok: warning: path enumeration truncated at " << cybok::kMaxPathsPerPair
                          << " paths per source\n";
            }
        } else if (*surface) {
            const auto in = load_inputs(model_path, index_dir, snapshot_dir);
            const auto result = cybok::run_analysis(in.model, in.snapshot, in.index);
            std::cout << cybok::surface_to_json(result.surface).dump(2) << "\n";
        } else if (*chains) {
            const auto in = load_inputs(model_path, index_dir, snapshot_dir);
            const auto result = cybok::run_analysis(in.model, in.snapshot, in.index, {target, max_len});
            std::cout << cybok::chains_to_json(*result.chains, target, max_len).dump(2) << "\n";
        } else if (*render) {
            const auto model = cybok::load_graphml(cybok::read_file(model_path));
            const auto kind = cybok::render_kind_from_string(kind_name);
            cybok::RenderSpec spec;
            if (kind != cybok::RenderKind::Topology) {
                if (report_path.empty()) throw cybok::InvalidArgument("--report is required for this kind");
                spec = cybok::render_spec_from_report(json::parse(cybok::read_file(report_path)), kind, chain_index);
            }
            write_output(out_path, cybok::render_graph(model, spec));
        } else if (*table) {
            std::cout << cybok::emit_results_table(table_from_report(json::parse(cybok::read_file(report_path))));
        } else if (*serve) {
            auto snap = std::make_shared<const cybok::CorpusSnapshot>(
                cybok::load_snapshot(snapshot_dir.empty() ? index_dir : snapshot_dir));
            auto idx = std::make_shared<const cybok::SearchIndex>(cybok::load_index(index_dir, *snap));
            cybok::AnalysisService service(snap, idx);
            std::optional<fs::path> static_path;
            if (!static_dir.empty()) static_path = static_dir;
            cybok::HttpServer server(service, static_path);
            const int bound = server.bind(host, port);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cerr << "cybok: serving http://" << host << ":" << bound << "/api/v1\n";
            server.listen();
            g_server = nullptr;
        }
    } catch (const cybok::FetchError& e) {
        std::cerr << "cybok: error: " << e.what() << " (retryable)\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "cybok: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
