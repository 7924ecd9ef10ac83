#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rehearse/events.hpp"
#include "rehearse/player_state.hpp"

namespace rehearse {

// On-disk layout under a data directory:
//   events/<player_id>.ndjson   one record per line, append-only
//   snapshots/<player_id>.json  latest snapshot, replaced atomically
//
// A record is the event's canonical JSON with an extra "crc" member holding
// the CRC-32 (hex) of the canonical JSON without it. A record is durable once
// its trailing newline is on disk; a torn last line is dropped on open.

struct LogOptions {
    bool fsync_on_append = false;
    std::uint64_t snapshot_interval = 1000;
};

std::string encode_record(const Event& event);
/// Throws CorruptLog on malformed JSON or checksum mismatch.
Event decode_record(std::string_view line);

/// Player ids double as file names, so they are restricted to [A-Za-z0-9_-].
bool valid_player_id(std::string_view id);

class EventLog {
public:
    /// Loads every stream under `dir`. Throws CorruptLog on a damaged record
    /// and StorageFailure when the directory cannot be used.
    explicit EventLog(std::filesystem::path dir, LogOptions options = {});

    /// Assigns the next sequence number for the event's player and appends.
    std::uint64_t append(Event event);

    std::vector<Event> events(const std::string& player_id) const;
    std::vector<std::string> players() const;
    bool has_player(const std::string& player_id) const;
    std::uint64_t last_sequence(const std::string& player_id) const;

    const std::filesystem::path& dir() const { return dir_; }
    const LogOptions& options() const { return options_; }

private:
    std::filesystem::path stream_path(const std::string& player_id) const;

    std::filesystem::path dir_;
    LogOptions options_;
    mutable std::shared_mutex mu_;
    std::map<std::string, std::vector<Event>> streams_;
};

struct Snapshot {
    std::string player_id;
    std::uint64_t as_of_sequence = 0;
    PlayerState state;
};

nlohmann::json to_json(const Snapshot& snap);
Snapshot snapshot_from_json(const nlohmann::json& doc);

void write_snapshot(const std::filesystem::path& data_dir, const Snapshot& snap);
/// nullopt when the player has no snapshot. Throws CorruptLog when the file
/// is damaged.
std::optional<Snapshot> read_snapshot(const std::filesystem::path& data_dir, const std::string& player_id);

/// Snapshot (when given) plus the events after it. Throws UnknownPlayer when
/// the player has no events.
PlayerState load_state(const EventLog& log, const std::string& player_id, const Snapshot* snapshot = nullptr);

struct LogAudit {
    std::string player_id;
    std::uint64_t events = 0;
    bool torn_tail = false;
    bool snapshot_present = false;
    bool ok = true;
    std::string error;
};

nlohmann::json to_json(const LogAudit& audit);

/// Read-only audit of every stream: checksums, sequence order, full replay,
/// and snapshot agreement with the replayed prefix. Nothing is modified.
std::vector<LogAudit> verify_log(const std::filesystem::path& data_dir);

}  // namespace rehearse
