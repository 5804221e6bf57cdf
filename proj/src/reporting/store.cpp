#include "llmchess/reporting/store.hpp"

#include <fmt/format.h>

namespace llmchess::reporting {

namespace {

void check_schema(const nlohmann::json& line) {
    if (!line.is_object() || !line.contains("schema_version"))
        throw SchemaError(-1, fmt::format("missing schema_version (expected {})", kSchemaVersion));
    const auto& v = line.at("schema_version");
    const int found = v.is_number_integer() ? v.get<int>() : -1;
    if (found != kSchemaVersion)
        throw SchemaError(found, fmt::format("schema version {} is not supported (expected {})", v.dump(),
                                             kSchemaVersion));
}

template <typename F>
void for_each_line(const std::filesystem::path& path, F&& f) {
    std::ifstream in(path);
    if (!in) throw StoreError("cannot open " + path.string());
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        try {
            f(nlohmann::json::parse(line));
        } catch (const SchemaError& e) {
            throw SchemaError(e.found(), fmt::format("{}:{}: {}", path.string(), number, e.what()));
        } catch (const std::exception& e) {
            throw StoreError(fmt::format("{}:{}: {}", path.string(), number, e.what()));
        }
    }
}

}  // namespace

JsonlWriter::JsonlWriter(const std::filesystem::path& path, Mode mode) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | (mode == Mode::Append ? std::ios::app : std::ios::trunc));
    if (!out_) throw StoreError("cannot open " + path.string() + " for writing");
}

void JsonlWriter::write(const nlohmann::json& line) {
    std::string text = line.dump();
    text += '\n';
    std::lock_guard lock(mu_);
    out_.write(text.data(), static_cast<std::streamsize>(text.size()));
    out_.flush();
    if (!out_) throw StoreError("write failed on " + path_.string());
}

nlohmann::json encode_game(const GameRecord& record) {
    nlohmann::json j = record;
    j["schema_version"] = kSchemaVersion;
    return j;
}

GameRecord decode_game(const nlohmann::json& line) {
    check_schema(line);
    return line.get<GameRecord>();
}

nlohmann::json encode_probe(const ProbeRecord& probe) {
    nlohmann::json j = probe;
    j["schema_version"] = kSchemaVersion;
    return j;
}

ProbeRecord decode_probe(const nlohmann::json& line) {
    check_schema(line);
    return line.get<ProbeRecord>();
}

nlohmann::json encode_transcript(const orchestrator::GameOutput& out) {
    nlohmann::json rejected = nlohmann::json::array();
    for (const auto& r : out.rejected) rejected.push_back({{"slot", r.slot}, {"content", r.content}});
    return {{"schema_version", kSchemaVersion},
            {"game_id", out.record.game_id},
            {"transcript_ref", out.record.transcript_ref},
            {"messages", out.transcript},
            {"rejected", rejected}};
}

void persist_game(const GameRecord& record, JsonlWriter& sink) { sink.write(encode_game(record)); }

std::vector<GameRecord> read_games(const std::filesystem::path& path) {
    std::vector<GameRecord> out;
    for_each_line(path, [&](const nlohmann::json& j) { out.push_back(decode_game(j)); });
    return out;
}

std::vector<ProbeRecord> read_probes(const std::filesystem::path& path) {
    std::vector<ProbeRecord> out;
    for_each_line(path, [&](const nlohmann::json& j) { out.push_back(decode_probe(j)); });
    return out;
}

void write_probes(const std::filesystem::path& path, const std::vector<ProbeRecord>& probes) {
    JsonlWriter w(path);
    for (const auto& p : probes) w.write(encode_probe(p));
}

std::optional<nlohmann::json> find_transcript(const std::filesystem::path& path, std::uint64_t game_id) {
    std::optional<nlohmann::json> found;
    for_each_line(path, [&](const nlohmann::json& j) {
        check_schema(j);
        if (!found && j.at("game_id").get<std::uint64_t>() == game_id) found = j;
    });
    return found;
}

RunStore::RunStore(const std::filesystem::path& dir) : games_(dir / kGamesFile), transcripts_(dir / kTranscriptsFile) {}

void RunStore::write(const orchestrator::GameOutput& out) {
    persist_game(out.record, games_);
    transcripts_.write(encode_transcript(out));
}

void write_manifest(const std::filesystem::path& path, const orchestrator::Manifest& manifest) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot open " + path.string() + " for writing");
    out << nlohmann::json(manifest).dump(2) << '\n';
}

}  // namespace llmchess::reporting
