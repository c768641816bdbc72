#include "cybok/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cybok/error.hpp"
#include "cybok/xml.hpp"

namespace cybok {

using nlohmann::json;

std::string_view to_string(Database db) {
    switch (db) {
        case Database::CAPEC: return "CAPEC";
        case Database::CWE: return "CWE";
        case Database::CVE: return "CVE";
    }
    return "?";
}

Database database_from_string(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "CAPEC") return Database::CAPEC;
    if (upper == "CWE") return Database::CWE;
    if (upper == "CVE") return Database::CVE;
    throw InvalidArgument("unknown database '" + std::string(name) + "'");
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

}  // namespace

bool is_well_formed_identifier(std::string_view id) {
    if (starts_with(id, "CAPEC-")) return all_digits(id.substr(6));
    if (starts_with(id, "CWE-")) return all_digits(id.substr(4));
    if (starts_with(id, "CVE-")) {
        auto rest = id.substr(4);
        auto dash = rest.find('-');
        if (dash != 4) return false;
        return all_digits(rest.substr(0, 4)) && all_digits(rest.substr(5));
    }
    return false;
}

std::optional<Database> database_of(std::string_view id) {
    if (!is_well_formed_identifier(id)) return std::nullopt;
    if (starts_with(id, "CAPEC-")) return Database::CAPEC;
    if (starts_with(id, "CWE-")) return Database::CWE;
    return Database::CVE;
}

std::vector<std::string> check_invariants(const AttackVectorEntry& entry) {
    std::vector<std::string> problems;
    const auto db = database_of(entry.identifier);
    if (!db) {
        problems.push_back("malformed identifier '" + entry.identifier + "'");
    } else if (*db != entry.database) {
        problems.push_back("identifier '" + entry.identifier + "' does not belong to " +
                           std::string(to_string(entry.database)));
    }
    auto check_set = [&](const std::set<std::string>& ids, Database expected, const char* field) {
        for (const auto& id : ids) {
            if (id == entry.identifier) problems.push_back(std::string(field) + " lists the entry itself");
            const auto rdb = database_of(id);
            if (!rdb || *rdb != expected) {
                problems.push_back(std::string(field) + " holds foreign identifier '" + id + "'");
            }
        }
    };
    check_set(entry.related_attack_patterns, Database::CAPEC, "related_attack_patterns");
    check_set(entry.related_weaknesses, Database::CWE, "related_weaknesses");
    check_set(entry.related_vulnerabilities, Database::CVE, "related_vulnerabilities");
    return problems;
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

namespace {

// Routes a related identifier into the right set, rejecting malformed ids
// and self references.
void add_related(AttackVectorEntry& entry, const std::string& id, std::vector<std::string>& warnings) {
    const auto db = database_of(id);
    if (!db) {
        warnings.push_back(entry.identifier + ": dropped malformed reference '" + id + "'");
        return;
    }
    if (id == entry.identifier) {
        warnings.push_back(entry.identifier + ": dropped self reference");
        return;
    }
    switch (*db) {
        case Database::CAPEC: entry.related_attack_patterns.insert(id); break;
        case Database::CWE: entry.related_weaknesses.insert(id); break;
        case Database::CVE: entry.related_vulnerabilities.insert(id); break;
    }
}

bool accept_identifier(const AttackVectorEntry& entry, std::vector<std::string>& warnings) {
    const auto db = database_of(entry.identifier);
    if (!db || *db != entry.database) {
        warnings.push_back("skipped entry with malformed identifier '" + entry.identifier + "'");
        return false;
    }
    return true;
}

bool is_retired_status(std::string_view status) {
    std::string lower(status);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower == "deprecated" || lower == "obsolete" || lower == "rejected" ||
           lower == "reserved";
}

// Depth-first search for elements with the given local name, not descending
// into matches.
void find_all(const xml::Element& e, std::string_view local, std::vector<const xml::Element*>& out) {
    for (const auto& c : e.children) {
        if (const auto* child = std::get_if<std::unique_ptr<xml::Element>>(&c)) {
            if ((*child)->local_name() == local) {
                out.push_back(child->get());
            } else {
                find_all(**child, local, out);
            }
        }
    }
}

std::string prose_of(const xml::Element& item, std::initializer_list<std::string_view> blocks) {
    std::string text;
    for (const auto& c : item.children) {
        const auto* child = std::get_if<std::unique_ptr<xml::Element>>(&c);
        if (!child) continue;
        const auto local = (*child)->local_name();
        if (std::find(blocks.begin(), blocks.end(), local) != blocks.end()) {
            text += ' ';
            text += (*child)->text();
        }
    }
    return normalize_whitespace(text);
}

void check_namespace(const xml::Element& root, std::initializer_list<std::string_view> known,
                     const char* what, ParseResult& result) {
    const auto ns = root.attribute("xmlns").value_or("");
    if (std::find(known.begin(), known.end(), ns) == known.end()) {
        result.warnings.push_back(std::string("unrecognized ") + what + " schema namespace '" + ns +
                                  "'; extracting fields best-effort");
    }
}

}  // namespace

ParseResult parse_capec(std::string_view raw) {
    ParseResult result;
    const auto doc = xml::parse(raw);
    const auto& root = *doc.root;
    if (root.local_name() != "Attack_Pattern_Catalog") {
        throw ParseError("not a CAPEC catalog: root element is <" + root.name + ">", root.byte_offset,
                         root.line);
    }
    check_namespace(root, {"http://capec.mitre.org/capec-3"}, "CAPEC", result);
    result.version = root.attribute("Version").value_or("");

    std::vector<const xml::Element*> patterns;
    find_all(root, "Attack_Pattern", patterns);
    for (const auto* p : patterns) {
        if (is_retired_status(p->attribute("Status").value_or(""))) continue;
        AttackVectorEntry entry;
        entry.database = Database::CAPEC;
        entry.identifier = "CAPEC-" + p->attribute("ID").value_or("");
        if (!accept_identifier(entry, result.warnings)) continue;
        entry.name = normalize_whitespace(p->attribute("Name").value_or(""));
        entry.description = prose_of(*p, {"Summary", "Description", "Extended_Description"});
        if (const auto* rel = p->child("Related_Weaknesses")) {
            for (const auto* w : rel->children_named("Related_Weakness")) {
                add_related(entry, "CWE-" + w->attribute("CWE_ID").value_or(""), result.warnings);
            }
        }
        result.entries.push_back(std::move(entry));
    }
    return result;
}

ParseResult parse_cwe(std::string_view raw) {
    ParseResult result;
    const auto doc = xml::parse(raw);
    const auto& root = *doc.root;
    if (root.local_name() != "Weakness_Catalog") {
        throw ParseError("not a CWE catalog: root element is <" + root.name + ">", root.byte_offset,
                         root.line);
    }
    check_namespace(root, {"http://cwe.mitre.org/cwe-6", "http://cwe.mitre.org/cwe-7"}, "CWE", result);
    result.version = root.attribute("Version").value_or("");

    std::vector<const xml::Element*> weaknesses;
    find_all(root, "Weakness", weaknesses);
    for (const auto* w : weaknesses) {
        if (is_retired_status(w->attribute("Status").value_or(""))) continue;
        AttackVectorEntry entry;
        entry.database = Database::CWE;
        entry.identifier = "CWE-" + w->attribute("ID").value_or("");
        if (!accept_identifier(entry, result.warnings)) continue;
        entry.name = normalize_whitespace(w->attribute("Name").value_or(""));
        entry.description = prose_of(*w, {"Description", "Extended_Description"});
        if (const auto* rel = w->child("Related_Attack_Patterns")) {
            for (const auto* a : rel->children_named("Related_Attack_Pattern")) {
                add_related(entry, "CAPEC-" + a->attribute("CAPEC_ID").value_or(""), result.warnings);
            }
        }
        if (const auto* examples = w->child("Observed_Examples")) {
            for (const auto* ex : examples->children_named("Observed_Example")) {
                if (const auto* ref = ex->child("Reference")) {
                    add_related(entry, normalize_whitespace(ref->text()), result.warnings);
                }
            }
        }
        result.entries.push_back(std::move(entry));
    }
    return result;
}

ParseResult parse_cve(std::string_view raw) {
    ParseResult result;
    json doc;
    try {
        doc = json::parse(raw);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed CVE feed: ") + e.what(), e.byte);
    }
    if (!doc.is_object() || !doc.contains("vulnerabilities") || !doc["vulnerabilities"].is_array()) {
        throw ParseError("not an NVD CVE feed: missing 'vulnerabilities' array", 0);
    }
    const auto format = doc.value("format", std::string{});
    const auto version = doc.value("version", std::string{});
    if (format != "NVD_CVE" || version != "2.0") {
        result.warnings.push_back("unrecognized CVE feed format '" + format + "' version '" + version +
                                  "'; extracting fields best-effort");
    }
    result.version = doc.value("timestamp", version);

    for (const auto& item : doc["vulnerabilities"]) {
        if (!item.is_object() || !item.contains("cve")) continue;
        const auto& cve = item["cve"];
        if (is_retired_status(cve.value("vulnStatus", std::string{}))) continue;

        AttackVectorEntry entry;
        entry.database = Database::CVE;
        entry.identifier = cve.value("id", std::string{});
        if (!accept_identifier(entry, result.warnings)) continue;

        std::string description;
        if (cve.contains("descriptions") && cve["descriptions"].is_array()) {
            for (const auto& d : cve["descriptions"]) {
                if (d.value("lang", std::string{}) == "en") {
                    description = d.value("value", std::string{});
                    break;
                }
            }
        }
        entry.description = normalize_whitespace(description);
        if (starts_with(entry.description, "** REJECT **") ||
            starts_with(entry.description, "** RESERVED **")) {
            continue;
        }
        if (cve.contains("weaknesses") && cve["weaknesses"].is_array()) {
            for (const auto& w : cve["weaknesses"]) {
                if (!w.contains("description") || !w["description"].is_array()) continue;
                for (const auto& d : w["description"]) {
                    const auto value = d.value("value", std::string{});
                    // NVD-CWE-Other / NVD-CWE-noinfo are placeholders, not weaknesses.
                    if (starts_with(value, "CWE-")) add_related(entry, value, result.warnings);
                }
            }
        }
        result.entries.push_back(std::move(entry));
    }
    return result;
}

ParseResult parse_fixture(std::string_view raw) {
    ParseResult result;
    const auto doc = xml::parse(raw);
    const auto& root = *doc.root;
    if (root.local_name() != "entries") {
        throw ParseError("not a fixture corpus: root element is <" + root.name + ">", root.byte_offset,
                         root.line);
    }
    result.version = root.attribute("version").value_or("");
    for (const auto* e : root.children_named("entry")) {
        if (is_retired_status(e->attribute("status").value_or(""))) continue;
        AttackVectorEntry entry;
        const auto db_name = e->attribute("db").value_or("");
        try {
            entry.database = database_from_string(db_name);
        } catch (const InvalidArgument&) {
            result.warnings.push_back("skipped entry with unknown db '" + db_name + "'");
            continue;
        }
        entry.identifier = e->attribute("id").value_or("");
        if (!accept_identifier(entry, result.warnings)) continue;
        if (const auto* n = e->child("name")) entry.name = normalize_whitespace(n->text());
        if (const auto* d = e->child("description")) entry.description = normalize_whitespace(d->text());
        for (const auto* r : e->children_named("rel")) {
            add_related(entry, r->attribute("id").value_or(""), result.warnings);
        }
        result.entries.push_back(std::move(entry));
    }
    return result;
}

ParseResult parse_source(Database db, std::string_view raw) {
    const auto first = raw.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (first != std::string_view::npos && (raw[first] == '{' || raw[first] == '[')) {
        if (db != Database::CVE) {
            throw ParseError("JSON documents are only accepted as CVE feeds", first);
        }
        return parse_cve(raw);
    }
    const auto doc = xml::parse(raw);
    if (doc.root->local_name() == "entries") {
        auto result = parse_fixture(raw);
        std::erase_if(result.entries, [db](const AttackVectorEntry& e) { return e.database != db; });
        return result;
    }
    switch (db) {
        case Database::CAPEC: return parse_capec(raw);
        case Database::CWE: return parse_cwe(raw);
        case Database::CVE: break;
    }
    throw ParseError("unsupported CVE document: root element is <" + doc.root->name + ">",
                     doc.root->byte_offset, doc.root->line);
}

const AttackVectorEntry* CorpusSnapshot::find(std::string_view id) const {
    auto it = entries.find(std::string(id));
    return it == entries.end() ? nullptr : &it->second;
}

std::size_t CorpusSnapshot::count(Database db) const {
    return static_cast<std::size_t>(std::count_if(
        entries.begin(), entries.end(), [db](const auto& kv) { return kv.second.database == db; }));
}

namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

std::string file_name(Database db) {
    std::string n(to_string(db));
    std::transform(n.begin(), n.end(), n.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return n + ".jsonl";
}

json entry_to_json(const AttackVectorEntry& e) {
    return json{{"db", to_string(e.database)},
                {"id", e.identifier},
                {"name", e.name},
                {"description", e.description},
                {"related_attack_patterns", e.related_attack_patterns},
                {"related_weaknesses", e.related_weaknesses},
                {"related_vulnerabilities", e.related_vulnerabilities}};
}

AttackVectorEntry entry_from_json(const json& j) {
    AttackVectorEntry e;
    e.database = database_from_string(j.at("db").get<std::string>());
    e.identifier = j.at("id").get<std::string>();
    e.name = j.at("name").get<std::string>();
    e.description = j.at("description").get<std::string>();
    e.related_attack_patterns = j.at("related_attack_patterns").get<std::set<std::string>>();
    e.related_weaknesses = j.at("related_weaknesses").get<std::set<std::string>>();
    e.related_vulnerabilities = j.at("related_vulnerabilities").get<std::set<std::string>>();
    return e;
}

}  // namespace

std::string serialize_entries(const CorpusSnapshot& snapshot, Database db) {
    std::string out;
    for (const auto& [id, entry] : snapshot.entries) {
        if (entry.database != db) continue;
        out += entry_to_json(entry).dump(-1, ' ', false, json::error_handler_t::replace);
        out += '\n';
    }
    return out;
}

std::string CorpusSnapshot::corpus_ref() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto db : kAllDatabases) {
        h = fnv1a(to_string(db), h);
        h = fnv1a(serialize_entries(*this, db), h);
    }
    return hex64(h);
}

SnapshotBuild build_snapshot(std::vector<AttackVectorEntry> entries,
                             std::map<Database, std::string> versions, std::string ingested_at) {
    if (entries.empty()) throw InvalidArgument("snapshot requires at least one entry");
    SnapshotBuild out;
    for (auto& e : entries) {
        const auto problems = check_invariants(e);
        if (!problems.empty()) throw ValidationError(e.identifier + ": " + problems.front());
        auto [it, inserted] = out.snapshot.entries.insert_or_assign(e.identifier, std::move(e));
        if (!inserted) out.warnings.push_back("duplicate identifier " + it->first + "; keeping last");
    }
    for (auto& [db, v] : versions) {
        if (out.snapshot.count(db) > 0) out.snapshot.source_versions[db] = std::move(v);
    }
    out.snapshot.ingested_at = std::move(ingested_at);
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PersistenceError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw PersistenceError("cannot write " + path.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw PersistenceError("short write to " + path.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw PersistenceError("cannot move " + tmp + " into place: " + ec.message());
}

void save_snapshot(const CorpusSnapshot& snapshot, const std::filesystem::path& dir) {
    if (snapshot.entries.empty()) throw InvalidArgument("snapshot requires at least one entry");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw PersistenceError("cannot create " + dir.string() + ": " + ec.message());

    json manifest;
    manifest["format"] = "cybok-snapshot";
    manifest["format_version"] = kStoreFormatVersion;
    manifest["ingested_at"] = snapshot.ingested_at;
    manifest["corpus_ref"] = snapshot.corpus_ref();
    manifest["source_versions"] = json::object();
    manifest["counts"] = json::object();
    manifest["files"] = json::object();
    for (auto db : kAllDatabases) {
        const auto n = snapshot.count(db);
        if (n == 0) continue;
        const std::string key(to_string(db));
        manifest["counts"][key] = n;
        manifest["files"][key] = file_name(db);
        auto v = snapshot.source_versions.find(db);
        manifest["source_versions"][key] = v == snapshot.source_versions.end() ? "" : v->second;
        write_file(dir / file_name(db), serialize_entries(snapshot, db));
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

CorpusSnapshot load_snapshot(const std::filesystem::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw PersistenceError("corrupt snapshot manifest in " + dir.string() + ": " + e.what());
    }
    if (manifest.value("format", "") != "cybok-snapshot" ||
        manifest.value("format_version", 0) != kStoreFormatVersion) {
        throw PersistenceError("unsupported snapshot format in " + dir.string());
    }
    CorpusSnapshot snapshot;
    snapshot.ingested_at = manifest.value("ingested_at", "");
    for (const auto& [key, file] : manifest.at("files").items()) {
        const auto db = database_from_string(key);
        snapshot.source_versions[db] = manifest["source_versions"].value(key, "");
        std::istringstream lines(read_file(dir / file.get<std::string>()));
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            try {
                auto entry = entry_from_json(json::parse(line));
                auto id = entry.identifier;
                snapshot.entries.insert_or_assign(std::move(id), std::move(entry));
            } catch (const std::exception& e) {
                throw PersistenceError(file.get<std::string>() + ":" + std::to_string(lineno) + ": " +
                                       e.what());
            }
        }
    }
    if (snapshot.entries.empty()) throw PersistenceError("snapshot in " + dir.string() + " is empty");
    if (manifest.value("corpus_ref", "") != snapshot.corpus_ref()) {
        throw PersistenceError("snapshot in " + dir.string() + " does not match its manifest corpus_ref");
    }
    return snapshot;
}

}  // namespace cybok
