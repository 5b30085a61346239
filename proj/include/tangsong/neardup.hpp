#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tangsong/corpus.hpp"

namespace tangsong {

struct NearDupDiff {
    std::size_t position; // body_norm position
    char32_t a = 0;
    char32_t b = 0;

    bool operator==(const NearDupDiff&) const = default;
};

/// An equal-length poem pair within a small character-substitution distance.
struct NearDupReport {
    std::string id_a, id_b; // id_a < id_b
    std::int32_t distance = 0;
    std::vector<NearDupDiff> diffs; // ascending positions; |diffs| == distance
    std::string author_a, author_b;
    bool same_title = false;
};

/// Position-wise distance over normalized bodies. Absent when lengths differ.
inline std::optional<std::pair<std::int32_t, std::vector<NearDupDiff>>>
hamming_norm(const Poem& a, const Poem& b) {
    if (a.body_norm.size() != b.body_norm.size()) return std::nullopt;
    std::vector<NearDupDiff> diffs;
    for (std::size_t p = 0; p < a.body_norm.size(); ++p)
        if (a.body_norm[p] != b.body_norm[p])
            diffs.push_back(NearDupDiff{p, a.body_norm[p], b.body_norm[p]});
    auto distance = static_cast<std::int32_t>(diffs.size());
    return std::make_pair(distance, std::move(diffs));
}

namespace detail {

inline NearDupReport make_report(const Poem& a, const Poem& b, std::int32_t distance,
                                 std::vector<NearDupDiff> diffs) {
    NearDupReport rep;
    rep.id_a = a.id;
    rep.id_b = b.id;
    rep.distance = distance;
    rep.diffs = std::move(diffs);
    rep.author_a = a.author_name;
    rep.author_b = b.author_name;
    rep.same_title = a.title == b.title;
    return rep;
}

} // namespace detail

/// All unordered pairs of equal normalized length within Hamming distance k,
/// each reported once with id_a < id_b, sorted by (id_a, id_b).
///
/// Candidate generation buckets poems by length, then by the content of one
/// of k+1 position chunks: two poems within distance k agree on at least one
/// chunk (pigeonhole), so no pair is missed; every candidate is then verified
/// position-wise. Equivalent to brute force, much cheaper on big corpora.
inline std::vector<NearDupReport> find_near_dups(const Corpus& corpus, std::int32_t k) {
    if (k < 0) throw Error("find_near_dups: k must be >= 0");

    std::vector<const Poem*> order;
    order.reserve(corpus.poems.size());
    for (const Poem& p : corpus.poems) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const Poem* a, const Poem* b) { return a->id < b->id; });

    std::map<std::size_t, std::vector<std::size_t>> by_length; // length -> indexes into order
    for (std::size_t i = 0; i < order.size(); ++i)
        by_length[order[i]->body_norm.size()].push_back(i);

    std::vector<NearDupReport> reports;
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (const auto& [length, members] : by_length) {
        if (members.size() < 2) continue;
        candidates.clear();
        if (length == 0) {
            // empty bodies are all identical; every pair qualifies
            for (std::size_t x = 0; x < members.size(); ++x)
                for (std::size_t y = x + 1; y < members.size(); ++y)
                    candidates.emplace_back(members[x], members[y]);
        } else {
            const std::size_t chunks = std::min<std::size_t>(k + 1, length);
            std::unordered_map<std::u32string, std::vector<std::size_t>> bucket;
            for (std::size_t c = 0; c < chunks; ++c) {
                const std::size_t lo = length * c / chunks;
                const std::size_t hi = length * (c + 1) / chunks;
                bucket.clear();
                for (std::size_t m : members)
                    bucket[order[m]->body_norm.substr(lo, hi - lo)].push_back(m);
                for (const auto& [chunk, hits] : bucket)
                    for (std::size_t x = 0; x < hits.size(); ++x)
                        for (std::size_t y = x + 1; y < hits.size(); ++y)
                            candidates.emplace_back(hits[x], hits[y]);
            }
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (const auto& [x, y] : candidates) {
            auto result = hamming_norm(*order[x], *order[y]);
            if (result && result->first <= k)
                reports.push_back(detail::make_report(*order[x], *order[y], result->first,
                                                      std::move(result->second)));
        }
    }
    std::sort(reports.begin(), reports.end(), [](const NearDupReport& a, const NearDupReport& b) {
        if (a.id_a != b.id_a) return a.id_a < b.id_a;
        return a.id_b < b.id_b;
    });
    return reports;
}

/// One line per pair:
///   id_a<TAB>id_b<TAB>distance<TAB>pos:a/b;...<TAB>author_a<TAB>author_b<TAB>same_title
inline std::string format_near_dup(const NearDupReport& rep) {
    std::string line = rep.id_a + '\t' + rep.id_b + '\t' + std::to_string(rep.distance) + '\t';
    bool first = true;
    for (const NearDupDiff& d : rep.diffs) {
        if (!first) line += ';';
        line += std::to_string(d.position);
        line += ':';
        line += utf8::encode(d.a);
        line += '/';
        line += utf8::encode(d.b);
        first = false;
    }
    line += '\t' + rep.author_a + '\t' + rep.author_b + '\t' +
            (rep.same_title ? "true" : "false");
    return line;
}

inline void write_near_dups(const std::vector<NearDupReport>& reports,
                            const std::filesystem::path& out_path) {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + out_path.string());
    for (const NearDupReport& rep : reports) out << format_near_dup(rep) << '\n';
    out.close();
    if (!out) throw Error("write failure on " + out_path.string());
}

} // namespace tangsong
