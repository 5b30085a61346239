#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tangsong/indexer.hpp"

namespace tangsong {

enum class ReportMode { Runs, Split };

inline std::string_view to_string(ReportMode m) {
    return m == ReportMode::Runs ? "runs" : "split";
}

inline std::optional<ReportMode> report_mode_from(std::string_view s) {
    if (s == "runs") return ReportMode::Runs;
    if (s == "split") return ReportMode::Split;
    return std::nullopt;
}

/// A shared piece of text, located in the viewpoint poem.
struct Fragment {
    std::u32string text;
    std::size_t start = 0; // position in the viewpoint poem's body_norm

    bool operator==(const Fragment&) const = default;
};

struct ComparisonRecord {
    std::string viewpoint_id;
    std::string other_id;
    ReportMode mode = ReportMode::Runs;
    std::vector<Fragment> fragments; // ascending start, non-overlapping
};

/// The basic filtering conditions F of the comparison algorithm.
struct FilterSpec {
    std::int32_t min_shared_distinct = 2; // stage-1 skip rule; pairs sharing fewer distinct characters produce nothing
    std::int32_t min_fragment_len = 1;    // 1 keeps unigrams
};

/// The output-format requests R.
struct ReportSpec {
    ReportMode mode = ReportMode::Runs;
    bool emit_both_viewpoints = false;
};

/// Distinct character indexes common to both poems. Symmetric; result is
/// sorted.
inline std::vector<std::int32_t> shared_distinct(const EncodedPoem& x, const EncodedPoem& y) {
    std::vector<std::int32_t> out;
    std::set_intersection(x.distinct.begin(), x.distinct.end(),
                          y.distinct.begin(), y.distinct.end(),
                          std::back_inserter(out));
    return out;
}

/// True once the sorted distinct sets share at least `n` indexes; stops
/// scanning as soon as the answer is known.
inline bool shares_at_least(const EncodedPoem& x, const EncodedPoem& y, std::int32_t n) {
    if (n <= 0) return true;
    std::int32_t found = 0;
    auto a = x.distinct.begin(), ae = x.distinct.end();
    auto b = y.distinct.begin(), be = y.distinct.end();
    while (a != ae && b != be) {
        if (*a < *b) ++a;
        else if (*b < *a) ++b;
        else {
            if (++found >= n) return true;
            ++a; ++b;
        }
    }
    return false;
}

namespace detail {

inline bool contains_index(const EncodedPoem& poem, std::int32_t idx) {
    return std::binary_search(poem.distinct.begin(), poem.distinct.end(), idx);
}

} // namespace detail

/// Maximal stretches of the viewpoint poem whose characters all occur
/// somewhere in the other poem. A stretch never crosses a raw-text
/// discontinuity of the viewpoint poem (positions separated by dropped
/// punctuation are in different segments), so fragments always read as
/// contiguous pieces of the original poem line.
inline std::vector<Fragment> viewpoint_runs(const EncodedPoem& view, const EncodedPoem& other) {
    std::vector<Fragment> runs;
    const std::size_t n = view.indexes.size();
    std::size_t pos = 0;
    while (pos < n) {
        if (!detail::contains_index(other, view.indexes[pos])) {
            ++pos;
            continue;
        }
        std::size_t end = pos + 1;
        while (end < n && view.segments[end] == view.segments[pos] &&
               detail::contains_index(other, view.indexes[end]))
            ++end;
        runs.push_back(Fragment{view.text.substr(pos, end - pos), pos});
        pos = end;
    }
    return runs;
}

namespace detail {

// Length of the longest prefix of `t` that occurs contiguously inside one
// raw-text segment of `other`. Zero when no character matches.
inline std::size_t longest_prefix_in(const std::u32string_view t, const EncodedPoem& other) {
    std::size_t best = 0;
    const std::size_t n = other.text.size();
    for (std::size_t p = 0; p < n; ++p) {
        if (other.text[p] != t[0]) continue;
        std::size_t len = 1;
        while (len < t.size() && p + len < n &&
               other.segments[p + len] == other.segments[p] &&
               other.text[p + len] == t[len])
            ++len;
        best = std::max(best, len);
        if (best == t.size()) break;
    }
    return best;
}

} // namespace detail

/// Partitions a run left to right by repeatedly taking the longest prefix of
/// the remainder that occurs contiguously in the other poem. Every character
/// of the run occurs in the other poem, so each step consumes at least one
/// character.
inline std::vector<Fragment> split_run(const Fragment& run, const EncodedPoem& other) {
    std::vector<Fragment> parts;
    std::size_t consumed = 0;
    while (consumed < run.text.size()) {
        std::u32string_view rest(run.text);
        rest.remove_prefix(consumed);
        std::size_t len = detail::longest_prefix_in(rest, other);
        if (len == 0)
            throw Error("split_run: character " + utf8::encode(rest[0]) +
                        " does not occur in poem " + other.poem_id);
        parts.push_back(Fragment{std::u32string(rest.substr(0, len)), run.start + consumed});
        consumed += len;
    }
    return parts;
}

namespace detail {

/// Fragment extraction for a pair already known to pass the stage-1 rule.
inline std::optional<ComparisonRecord> build_record(const EncodedPoem& view,
                                                    const EncodedPoem& other,
                                                    const FilterSpec& f,
                                                    const ReportSpec& r);

} // namespace detail

/// One comparison of a poem pair from the viewpoint of `view`. Absent when
/// the pair fails the stage-1 skip rule (fewer than min_shared_distinct
/// shared characters) or when no fragment survives the length threshold.
inline std::optional<ComparisonRecord> compare_pair(const EncodedPoem& view,
                                                    const EncodedPoem& other,
                                                    const FilterSpec& f,
                                                    const ReportSpec& r) {
    if (view.poem_id == other.poem_id)
        throw Error("compare_pair: poem compared against itself: " + view.poem_id);
    if (!shares_at_least(view, other, f.min_shared_distinct)) return std::nullopt;
    return detail::build_record(view, other, f, r);
}

inline std::optional<ComparisonRecord> detail::build_record(const EncodedPoem& view,
                                                            const EncodedPoem& other,
                                                            const FilterSpec& f,
                                                            const ReportSpec& r) {
    std::vector<Fragment> fragments = viewpoint_runs(view, other);
    if (r.mode == ReportMode::Split) {
        std::vector<Fragment> split;
        for (const Fragment& run : fragments) {
            auto parts = split_run(run, other);
            split.insert(split.end(), std::make_move_iterator(parts.begin()),
                         std::make_move_iterator(parts.end()));
        }
        fragments = std::move(split);
    }
    if (f.min_fragment_len > 1) {
        std::erase_if(fragments, [&](const Fragment& frag) {
            return frag.text.size() < static_cast<std::size_t>(f.min_fragment_len);
        });
    }
    if (fragments.empty()) return std::nullopt;

    ComparisonRecord rec;
    rec.viewpoint_id = view.poem_id;
    rec.other_id = other.poem_id;
    rec.mode = r.mode;
    rec.fragments = std::move(fragments);
    return rec;
}

} // namespace tangsong
