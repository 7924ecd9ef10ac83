#include "rehearse/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include <zlib.h>

#include "rehearse/error.hpp"
#include "rehearse/json_io.hpp"

namespace rehearse {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string crc_hex(std::string_view bytes) {
    const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
    return buf;
}

void write_all(int fd, std::string_view bytes, const fs::path& path) {
    while (!bytes.empty()) {
        const auto n = ::write(fd, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::StorageFailure, path.string() + ": " + std::strerror(errno));
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

struct StreamRead {
    std::vector<Event> events;
    bool torn_tail = false;
    std::uintmax_t durable_bytes = 0;
};

StreamRead read_stream(const fs::path& path, const std::string& player_id) {
    StreamRead out;
    const std::string bytes = json_io::read_text(path);
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const auto nl = bytes.find('\n', pos);
        if (nl == std::string::npos) {
            out.torn_tail = true;
            break;
        }
        const std::string_view line(bytes.data() + pos, nl - pos);
        Event e;
        try {
            e = decode_record(line);
        } catch (const Error& err) {
            throw Error(ErrorCode::CorruptLog, path.string() + " at byte " + std::to_string(pos) + ": " + err.what());
        }
        if (e.player_id != player_id) {
            throw Error(ErrorCode::CorruptLog, path.string() + ": record for '" + e.player_id + "'");
        }
        const std::uint64_t expected = out.events.empty() ? 1 : out.events.back().sequence_number + 1;
        if (e.sequence_number != expected) {
            throw Error(ErrorCode::CorruptLog, path.string() + ": sequence " + std::to_string(e.sequence_number) +
                                                   ", expected " + std::to_string(expected));
        }
        out.events.push_back(std::move(e));
        pos = nl + 1;
        out.durable_bytes = pos;
    }
    return out;
}

std::string player_from_stream(const fs::path& p) { return p.stem().string(); }

fs::path snapshot_path(const fs::path& data_dir, const std::string& player_id) {
    return data_dir / "snapshots" / (player_id + ".json");
}

}  // namespace

std::string encode_record(const Event& event) {
    json j = to_json(event);
    const std::string body = j.dump();
    j["crc"] = crc_hex(body);
    return j.dump();
}

Event decode_record(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, std::string("unparseable record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("crc") || !j["crc"].is_string()) {
        throw Error(ErrorCode::CorruptLog, "record without checksum");
    }
    const std::string crc = j["crc"].get<std::string>();
    j.erase("crc");
    if (crc_hex(j.dump()) != crc) throw Error(ErrorCode::CorruptLog, "checksum mismatch");
    try {
        return event_from_json(j);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptLog, e.what());
    }
}

bool valid_player_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_';
        if (!ok) return false;
    }
    return true;
}

EventLog::EventLog(fs::path dir, LogOptions options) : dir_(std::move(dir)), options_(options) {
    if (options_.snapshot_interval == 0) throw Error(ErrorCode::InvalidConfig, "snapshot_interval must be >= 1");
    std::error_code ec;
    fs::create_directories(dir_ / "events", ec);
    if (!ec) fs::create_directories(dir_ / "snapshots", ec);
    if (ec) throw Error(ErrorCode::StorageFailure, dir_.string() + ": " + ec.message());

    for (const auto& entry : fs::directory_iterator(dir_ / "events")) {
        if (entry.path().extension() != ".ndjson") continue;
        const auto player = player_from_stream(entry.path());
        auto read = read_stream(entry.path(), player);
        if (read.torn_tail) fs::resize_file(entry.path(), read.durable_bytes);
        if (!read.events.empty()) streams_[player] = std::move(read.events);
    }
}

fs::path EventLog::stream_path(const std::string& player_id) const {
    return dir_ / "events" / (player_id + ".ndjson");
}

std::uint64_t EventLog::append(Event event) {
    if (!valid_player_id(event.player_id)) {
        throw Error(ErrorCode::InvalidConfig, "invalid player id '" + event.player_id + "'");
    }
    std::unique_lock lock(mu_);
    auto& stream = streams_[event.player_id];
    event.sequence_number = stream.empty() ? 1 : stream.back().sequence_number + 1;
    const std::string line = encode_record(event) + "\n";

    const auto path = stream_path(event.player_id);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) {
        if (stream.empty()) streams_.erase(event.player_id);
        throw Error(ErrorCode::StorageFailure, path.string() + ": " + std::strerror(errno));
    }
    try {
        write_all(fd, line, path);
        if (options_.fsync_on_append && ::fsync(fd) != 0) {
            throw Error(ErrorCode::StorageFailure, path.string() + ": fsync: " + std::strerror(errno));
        }
    } catch (...) {
        ::close(fd);
        if (stream.empty()) streams_.erase(event.player_id);
        throw;
    }
    ::close(fd);
    stream.push_back(std::move(event));
    return stream.back().sequence_number;
}

std::vector<Event> EventLog::events(const std::string& player_id) const {
    std::shared_lock lock(mu_);
    const auto it = streams_.find(player_id);
    return it == streams_.end() ? std::vector<Event>{} : it->second;
}

std::vector<std::string> EventLog::players() const {
    std::shared_lock lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, _] : streams_) out.push_back(id);
    return out;
}

bool EventLog::has_player(const std::string& player_id) const {
    std::shared_lock lock(mu_);
    return streams_.contains(player_id);
}

std::uint64_t EventLog::last_sequence(const std::string& player_id) const {
    std::shared_lock lock(mu_);
    const auto it = streams_.find(player_id);
    return it == streams_.end() ? 0 : it->second.back().sequence_number;
}

// ---------------------------------------------------------------------------

json to_json(const Snapshot& snap) {
    return {{"player_id", snap.player_id}, {"as_of_sequence", snap.as_of_sequence}, {"state", to_json(snap.state)}};
}

Snapshot snapshot_from_json(const json& j) {
    json_io::require_keys(j, {"player_id", "as_of_sequence", "state", "crc"}, "snapshot");
    Snapshot s;
    s.player_id = json_io::get<std::string>(j, "player_id", "snapshot");
    s.as_of_sequence = json_io::get<std::uint64_t>(j, "as_of_sequence", "snapshot");
    s.state = player_state_from_json(j.at("state"));
    return s;
}

void write_snapshot(const fs::path& data_dir, const Snapshot& snap) {
    json j = to_json(snap);
    j["crc"] = crc_hex(j.dump());
    const auto path = snapshot_path(data_dir, snap.player_id);
    const auto tmp = fs::path(path.string() + ".tmp");
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::StorageFailure, path.parent_path().string() + ": " + ec.message());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << j.dump() << '\n';
        if (!out) throw Error(ErrorCode::StorageFailure, tmp.string() + ": write failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::StorageFailure, path.string() + ": " + ec.message());
}

std::optional<Snapshot> read_snapshot(const fs::path& data_dir, const std::string& player_id) {
    const auto path = snapshot_path(data_dir, player_id);
    if (!fs::exists(path)) return std::nullopt;
    try {
        json j = json_io::read_file(path);
        const std::string crc = j.at("crc").get<std::string>();
        json body = j;
        body.erase("crc");
        if (crc_hex(body.dump()) != crc) throw Error(ErrorCode::CorruptLog, "snapshot checksum mismatch");
        auto snap = snapshot_from_json(j);
        if (snap.player_id != player_id) throw Error(ErrorCode::CorruptLog, "snapshot for another player");
        return snap;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, path.string() + ": " + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptLog) throw;
        throw Error(ErrorCode::CorruptLog, path.string() + ": " + e.what());
    }
}

PlayerState load_state(const EventLog& log, const std::string& player_id, const Snapshot* snapshot) {
    const auto events = log.events(player_id);
    if (events.empty()) throw Error(ErrorCode::UnknownPlayer, player_id);
    if (!snapshot) return replay(events);
    if (snapshot->player_id != player_id || snapshot->as_of_sequence > events.back().sequence_number) {
        throw Error(ErrorCode::CorruptLog, "snapshot does not belong to the stream of '" + player_id + "'");
    }
    PlayerState state = snapshot->state;
    // Sequence numbers are dense from 1, so the tail starts at index as_of.
    replay_onto(state, std::span<const Event>(events).subspan(snapshot->as_of_sequence));
    return state;
}

json to_json(const LogAudit& a) {
    return {{"player_id", a.player_id}, {"events", a.events},  {"torn_tail", a.torn_tail},
            {"snapshot", a.snapshot_present}, {"ok", a.ok}, {"error", a.error}};
}

std::vector<LogAudit> verify_log(const fs::path& data_dir) {
    std::vector<LogAudit> out;
    const auto events_dir = data_dir / "events";
    if (!fs::is_directory(events_dir)) throw Error(ErrorCode::StorageFailure, events_dir.string() + ": no event log");
    std::vector<fs::path> streams;
    for (const auto& entry : fs::directory_iterator(events_dir)) {
        if (entry.path().extension() == ".ndjson") streams.push_back(entry.path());
    }
    std::sort(streams.begin(), streams.end());
    for (const auto& path : streams) {
        LogAudit a;
        a.player_id = player_from_stream(path);
        try {
            auto read = read_stream(path, a.player_id);
            a.events = read.events.size();
            a.torn_tail = read.torn_tail;
            const PlayerState full = replay(read.events);
            const auto snap = read_snapshot(data_dir, a.player_id);
            a.snapshot_present = snap.has_value();
            if (snap) {
                if (snap->as_of_sequence > a.events) throw Error(ErrorCode::CorruptLog, "snapshot ahead of the log");
                const auto prefix = std::span<const Event>(read.events).first(snap->as_of_sequence);
                if (to_json(replay(prefix)).dump() != to_json(snap->state).dump()) {
                    throw Error(ErrorCode::CorruptLog, "snapshot disagrees with replayed prefix");
                }
                PlayerState tail = snap->state;
                replay_onto(tail, std::span<const Event>(read.events).subspan(snap->as_of_sequence));
                if (to_json(tail).dump() != to_json(full).dump()) {
                    throw Error(ErrorCode::CorruptLog, "snapshot plus tail disagrees with full replay");
                }
            }
        } catch (const Error& e) {
            a.ok = false;
            a.error = e.what();
        }
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace rehearse
