#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tangsong/corpus.hpp"
#include "tangsong/record.hpp"

namespace tangsong {

/// Stage-2 selection criteria over stage-1 record files. Conditions compose
/// with AND; fragment lengths are measured in characters.
struct RecordPredicate {
    std::int32_t min_fragments = 1;
    // at least `first` fragments of length >= `second`
    std::optional<std::pair<std::int32_t, std::int32_t>> min_long_fragments;
    std::optional<std::int32_t> min_max_len; // longest fragment at least this long
    bool cross_author_only = false;
    bool cross_collection_only = false;
    std::optional<std::set<std::string>> author_allowlist; // either record author in the set
};

/// True iff every set condition holds for the record. The corpus is needed
/// only for the collection condition; author conditions use the record
/// header fields, which carry the corpus author names verbatim.
inline bool eval_predicate(const ParsedRecord& rec, const RecordPredicate& p,
                           const Corpus* corpus = nullptr) {
    if (static_cast<std::int32_t>(rec.fragments.size()) < p.min_fragments) return false;
    if (p.min_long_fragments) {
        const auto [count, len] = *p.min_long_fragments;
        std::int32_t long_fragments = 0;
        for (const std::string& f : rec.fragments)
            if (utf8::length(f) >= static_cast<std::size_t>(len)) ++long_fragments;
        if (long_fragments < count) return false;
    }
    if (p.min_max_len) {
        std::size_t longest = 0;
        for (const std::string& f : rec.fragments) longest = std::max(longest, utf8::length(f));
        if (longest < static_cast<std::size_t>(*p.min_max_len)) return false;
    }
    if (p.cross_author_only && rec.viewpoint_author == rec.other_author) return false;
    if (p.cross_collection_only) {
        if (!corpus) throw Error("cross-collection filtering requires the corpus");
        const Poem& a = corpus->at(rec.viewpoint_id);
        const Poem& b = corpus->at(rec.other_id);
        if (a.collection == b.collection) return false;
    }
    if (p.author_allowlist &&
        !p.author_allowlist->count(rec.viewpoint_author) &&
        !p.author_allowlist->count(rec.other_author))
        return false;
    return true;
}

namespace detail {

inline std::vector<std::filesystem::path> shard_files(const std::filesystem::path& in_dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> shards;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("records-", 0) == 0 && name.size() >= 4 &&
            name.compare(name.size() - 4, 4, ".txt") == 0)
            shards.push_back(entry.path());
    }
    // zero-padded shard numbers: name order is shard order
    std::sort(shards.begin(), shards.end());
    return shards;
}

} // namespace detail

/// Streams over a finished stage-1 output directory and copies the records
/// matching the predicate, byte for byte, preserving shard order then line
/// order. Memory use is one line at a time, so 300G inputs are fine.
/// Refuses to run when the _DONE sentinel is missing.
inline std::uint64_t stream_filter(const std::filesystem::path& in_dir,
                                   const RecordPredicate& p,
                                   const std::filesystem::path& out_path,
                                   const Corpus* corpus = nullptr) {
    namespace fs = std::filesystem;
    if (!fs::exists(in_dir / "_DONE"))
        throw Error("refusing to filter " + in_dir.string() +
                    ": no _DONE sentinel (incomplete or aborted compare run)");
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path.string());

    std::uint64_t kept = 0;
    for (const fs::path& shard : detail::shard_files(in_dir)) {
        std::ifstream in(shard, std::ios::binary);
        if (!in) throw Error("cannot open shard " + shard.string());
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            ParsedRecord rec;
            try {
                rec = parse_record(line);
            } catch (const Error& e) {
                throw Error(shard.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
            if (eval_predicate(rec, p, corpus)) {
                out << line << '\n';
                ++kept;
            }
        }
    }
    out.close();
    if (!out) throw Error("write failure on " + out_path.string());
    return kept;
}

} // namespace tangsong
