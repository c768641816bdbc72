#include "cybok/fetch.hpp"

#include <algorithm>
#include <cctype>

#include <curl/curl.h>
#include <json.hpp>

#include "cybok/error.hpp"

namespace cybok {

using nlohmann::json;

namespace {

std::string lower_name(Database db) {
    std::string n(to_string(db));
    std::transform(n.begin(), n.end(), n.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return n;
}

bool is_url(std::string_view s) {
    return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

std::size_t on_body(char* data, std::size_t size, std::size_t nmemb, void* user) {
    static_cast<std::string*>(user)->append(data, size * nmemb);
    return size * nmemb;
}

std::string download(Database db, const std::string& url) {
    static const bool initialized = [] { return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK; }();
    if (!initialized) throw FetchError(std::string(to_string(db)), "libcurl initialization failed");

    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> handle(curl_easy_init(), curl_easy_cleanup);
    if (!handle) throw FetchError(std::string(to_string(db)), "cannot create transfer handle");
    std::string body;
    char errbuf[CURL_ERROR_SIZE] = {0};
    curl_easy_setopt(handle.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(handle.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(handle.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(handle.get(), CURLOPT_ACCEPT_ENCODING, "");
    curl_easy_setopt(handle.get(), CURLOPT_CONNECTTIMEOUT, 30L);
    curl_easy_setopt(handle.get(), CURLOPT_WRITEFUNCTION, on_body);
    curl_easy_setopt(handle.get(), CURLOPT_WRITEDATA, &body);
    curl_easy_setopt(handle.get(), CURLOPT_ERRORBUFFER, errbuf);
    const auto rc = curl_easy_perform(handle.get());
    if (rc != CURLE_OK) {
        throw FetchError(std::string(to_string(db)),
                         "download of " + url + " failed: " + (errbuf[0] ? errbuf : curl_easy_strerror(rc)));
    }
    return body;
}

std::string extension_for(std::string_view bytes) {
    const auto first = bytes.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (first != std::string_view::npos && (bytes[first] == '{' || bytes[first] == '[')) return ".json";
    return ".xml";
}

}  // namespace

CorpusConfig CorpusConfig::from_offline_dir(const std::filesystem::path& dir) {
    CorpusConfig config;
    const std::pair<Database, std::vector<std::string>> candidates[] = {
        {Database::CAPEC, {"capec.xml"}},
        {Database::CWE, {"cwe.xml"}},
        {Database::CVE, {"cve.json", "cve.xml"}},
    };
    for (const auto& [db, names] : candidates) {
        for (const auto& n : names) {
            if (std::filesystem::exists(dir / n)) {
                config.sources[db] = (dir / n).string();
                break;
            }
        }
    }
    if (config.sources.empty()) throw InvalidArgument("no corpus sources found in " + dir.string());
    return config;
}

CorpusConfig CorpusConfig::from_json(std::string_view text) {
    CorpusConfig config;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed corpus config: ") + e.what(), e.byte);
    }
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) throw InvalidArgument("corpus config value for '" + key + "' must be a string");
        config.sources[database_from_string(key)] = value.get<std::string>();
    }
    return config;
}

CorpusConfig CorpusConfig::restricted_to(const std::vector<Database>& dbs) const {
    CorpusConfig out;
    for (const auto& [db, src] : sources) {
        if (std::find(dbs.begin(), dbs.end(), db) != dbs.end()) out.sources[db] = src;
    }
    return out;
}

FetchReport fetch_sources(const CorpusConfig& config, const std::filesystem::path& destination) {
    if (config.sources.empty()) throw InvalidArgument("corpus config enables no database");
    std::error_code ec;
    std::filesystem::create_directories(destination, ec);
    if (ec) throw PersistenceError("cannot create " + destination.string() + ": " + ec.message());

    FetchReport report;
    for (const auto& [db, origin] : config.sources) {
        FetchedSource src;
        src.database = db;
        src.origin = origin;
        std::string bytes;
        if (is_url(origin)) {
            bytes = download(db, origin);
            src.from_network = true;
        } else {
            std::string path = origin;
            if (path.rfind("file://", 0) == 0) path = path.substr(7);
            try {
                bytes = read_file(path);
            } catch (const PersistenceError&) {
                throw FetchError(std::string(to_string(db)), "cannot read local source " + path);
            }
        }
        if (bytes.empty()) {
            throw CorruptSourceError(std::string(to_string(db)) + ": source " + origin + " is empty");
        }
        try {
            src.version = parse_source(db, bytes).version;
        } catch (const ParseError& e) {
            throw CorruptSourceError(std::string(to_string(db)) + ": source " + origin +
                                     " is not a readable document: " + e.what());
        }
        src.bytes = bytes.size();
        src.stored_path = destination / (lower_name(db) + extension_for(bytes));
        write_file(src.stored_path, bytes);
        report.sources.push_back(std::move(src));
    }

    json manifest = json::array();
    for (const auto& s : report.sources) {
        manifest.push_back({{"db", to_string(s.database)},
                            {"origin", s.origin},
                            {"file", s.stored_path.filename().string()},
                            {"version", s.version},
                            {"bytes", s.bytes},
                            {"from_network", s.from_network}});
    }
    write_file(destination / kSourcesManifest, manifest.dump(2) + "\n");
    return report;
}

FetchReport load_fetch_report(const std::filesystem::path& destination) {
    FetchReport report;
    json manifest;
    try {
        manifest = json::parse(read_file(destination / kSourcesManifest));
    } catch (const json::exception& e) {
        throw PersistenceError("corrupt " + std::string(kSourcesManifest) + ": " + e.what());
    }
    for (const auto& s : manifest) {
        FetchedSource src;
        src.database = database_from_string(s.at("db").get<std::string>());
        src.origin = s.value("origin", "");
        src.stored_path = destination / s.at("file").get<std::string>();
        src.version = s.value("version", "");
        src.bytes = s.value("bytes", std::size_t{0});
        src.from_network = s.value("from_network", false);
        report.sources.push_back(std::move(src));
    }
    return report;
}

}  // namespace cybok
