#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "tangsong/corpus.hpp"
#include "tangsong/findcommon.hpp"
#include "tangsong/indexer.hpp"
#include "tangsong/record.hpp"

namespace tangsong {

/// Number of unordered pairs over n items.
constexpr std::uint64_t pair_count(std::uint64_t n) {
    return n < 2 ? 0 : n * (n - 1) / 2;
}

struct CompareOptions {
    FilterSpec filter;
    ReportSpec report;
    std::int32_t shards = 1;
    std::int32_t workers = 1;
    std::uint64_t block_size = 32768; // pairs per unit of work distribution
    // Called periodically from a monitor thread while the scan runs.
    std::function<void(std::uint64_t pairs_done, std::uint64_t pairs_total)> progress;
};

struct CompareSummary {
    std::uint64_t pairs_scanned = 0;
    std::uint64_t pairs_skipped = 0;  // stage-1 rule: too few shared characters
    std::uint64_t records_emitted = 0;
    double wall_seconds = 0.0;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Pairs (i, j), i < j, are linearized by i then j. First pair index of row i:
inline std::uint64_t row_start(std::uint64_t i, std::uint64_t n) {
    return i * (n - 1) - i * (i - 1) / 2;
}

// Locates the (i, j) pair at linear index k.
inline void locate_pair(std::uint64_t k, std::uint64_t n, std::uint64_t& i, std::uint64_t& j) {
    std::uint64_t lo = 0, hi = n - 1; // row_start(lo) <= k < row_start(hi)
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (row_start(mid, n) <= k) lo = mid;
        else hi = mid;
    }
    i = lo;
    j = i + 1 + (k - row_start(i, n));
}

inline std::string shard_file_name(std::int32_t shard) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "records-%05d.txt", shard);
    return buf;
}

} // namespace detail

/// Scans every unordered poem pair exactly once and writes one record per
/// surviving viewpoint. Records are routed to shard files by
/// fnv1a(viewpoint_id) mod shards; each final shard file is sorted by
/// (viewpoint_id, other_id), so output bytes do not depend on the worker
/// count or scheduling order.
///
/// Workers write to private per-(worker, shard) spill files; a single merge
/// step afterwards sorts and concatenates them. On success the directory
/// contains vocab.txt, records-*.txt, summary.json and a _DONE sentinel;
/// a missing sentinel marks an aborted, incomplete run.
inline CompareSummary compare_all(const Corpus& corpus, const Vocabulary& vocab,
                                  const CompareOptions& options,
                                  const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();

    if (options.shards < 1 || options.shards > 99999)
        throw Error("compare_all: shards must be in 1..99999");
    if (options.workers < 1) throw Error("compare_all: workers must be >= 1");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    fs::remove(out_dir / "_DONE", ec); // a rerun invalidates the previous sentinel first

    save_vocab(vocab, out_dir / "vocab.txt");

    // Encode all poems once, in id order; pair (i, j) with i < j then has
    // id_i < id_j, which is the viewpoint chosen when only one is emitted.
    std::vector<const Poem*> order;
    order.reserve(corpus.poems.size());
    for (const Poem& p : corpus.poems) order.push_back(&p);
    std::sort(order.begin(), order.end(),
              [](const Poem* a, const Poem* b) { return a->id < b->id; });
    std::vector<EncodedPoem> encoded;
    encoded.reserve(order.size());
    for (const Poem* p : order) encoded.push_back(encode_poem(*p, vocab));

    const std::uint64_t n = encoded.size();
    const std::uint64_t total = pair_count(n);
    const std::uint64_t block = options.block_size > 0 ? options.block_size : 32768;
    const std::uint64_t num_blocks = total == 0 ? 0 : (total + block - 1) / block;
    const int num_workers = static_cast<int>(std::min<std::uint64_t>(
        static_cast<std::uint64_t>(options.workers), num_blocks ? num_blocks : 1));

    std::atomic<std::uint64_t> next_block{0};
    std::atomic<std::uint64_t> pairs_done{0};
    std::atomic<std::uint64_t> skipped{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    auto spill_path = [&](int worker, std::int32_t shard) {
        return out_dir / ("spill-" + std::to_string(worker) + "-" + std::to_string(shard) + ".tmp");
    };

    auto worker_fn = [&](int worker) {
        try {
            std::vector<std::ofstream> spills(static_cast<std::size_t>(options.shards));
            auto spill = [&](std::int32_t shard) -> std::ofstream& {
                std::ofstream& out = spills[static_cast<std::size_t>(shard)];
                if (!out.is_open()) {
                    out.open(spill_path(worker, shard), std::ios::binary | std::ios::trunc);
                    if (!out) throw Error("cannot open spill file in " + out_dir.string());
                }
                return out;
            };
            auto emit = [&](const EncodedPoem& view, const EncodedPoem& other) {
                auto rec = detail::build_record(view, other, options.filter, options.report);
                if (!rec) return;
                std::int32_t shard = static_cast<std::int32_t>(
                    detail::fnv1a(view.poem_id) % static_cast<std::uint64_t>(options.shards));
                std::ofstream& out = spill(shard);
                out << view.poem_id << '\t' << other.poem_id << '\t'
                    << format_record(*rec, corpus) << '\n';
                if (!out) throw Error("spill write failure in " + out_dir.string());
            };

            std::uint64_t local_skipped = 0;
            std::uint64_t b;
            while ((b = next_block.fetch_add(1)) < num_blocks) {
                const std::uint64_t k0 = b * block;
                const std::uint64_t k1 = std::min(k0 + block, total);
                std::uint64_t i, j;
                detail::locate_pair(k0, n, i, j);
                for (std::uint64_t k = k0; k < k1; ++k) {
                    const EncodedPoem& a = encoded[i];
                    const EncodedPoem& c = encoded[j];
                    if (!shares_at_least(a, c, options.filter.min_shared_distinct)) {
                        ++local_skipped;
                    } else {
                        emit(a, c);
                        if (options.report.emit_both_viewpoints) emit(c, a);
                    }
                    if (++j == n) { ++i; j = i + 1; }
                }
                pairs_done.fetch_add(k1 - k0, std::memory_order_relaxed);
            }
            skipped.fetch_add(local_skipped, std::memory_order_relaxed);
            for (auto& s : spills)
                if (s.is_open()) {
                    s.close();
                    if (!s) throw Error("spill close failure in " + out_dir.string());
                }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };

    std::atomic<bool> scan_finished{false};
    std::thread monitor;
    if (options.progress) {
        monitor = std::thread([&] {
            while (!scan_finished.load()) {
                options.progress(pairs_done.load(std::memory_order_relaxed), total);
                std::this_thread::sleep_for(std::chrono::milliseconds(500));
            }
            options.progress(pairs_done.load(std::memory_order_relaxed), total);
        });
    }

    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(num_workers));
    for (int w = 0; w < num_workers; ++w) workers.emplace_back(worker_fn, w);
    for (auto& t : workers) t.join();
    scan_finished.store(true);
    if (monitor.joinable()) monitor.join();

    if (failure) {
        for (int w = 0; w < num_workers; ++w)
            for (std::int32_t s = 0; s < options.shards; ++s)
                fs::remove(spill_path(w, s), ec);
        std::rethrow_exception(failure);
    }

    // Merge: per shard, gather spill lines, sort by (viewpoint_id, other_id),
    // strip the sort key, write the final shard file.
    std::uint64_t records_emitted = 0;
    for (std::int32_t s = 0; s < options.shards; ++s) {
        struct Keyed {
            std::string view_id, other_id, payload;
            bool operator<(const Keyed& rhs) const {
                if (view_id != rhs.view_id) return view_id < rhs.view_id;
                return other_id < rhs.other_id;
            }
        };
        std::vector<Keyed> lines;
        for (int w = 0; w < num_workers; ++w) {
            const fs::path sp = spill_path(w, s);
            if (!fs::exists(sp)) continue;
            std::ifstream in(sp, std::ios::binary);
            std::string line;
            while (std::getline(in, line)) {
                auto t1 = line.find('\t');
                auto t2 = line.find('\t', t1 + 1);
                if (t1 == std::string::npos || t2 == std::string::npos)
                    throw Error("corrupt spill line in " + sp.string());
                lines.push_back(Keyed{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
                                      line.substr(t2 + 1)});
            }
        }
        std::sort(lines.begin(), lines.end());
        const fs::path shard_path = out_dir / detail::shard_file_name(s);
        std::ofstream out(shard_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write shard file " + shard_path.string());
        for (const Keyed& k : lines) out << k.payload << '\n';
        out.close();
        if (!out) throw Error("shard write failure on " + shard_path.string());
        records_emitted += lines.size();
        for (int w = 0; w < num_workers; ++w) fs::remove(spill_path(w, s), ec);
    }

    CompareSummary summary;
    summary.pairs_scanned = total;
    summary.pairs_skipped = skipped.load();
    summary.records_emitted = records_emitted;
    summary.wall_seconds =
        std::chrono::duration_cast<std::chrono::duration<double>>(clock::now() - t0).count();

    nlohmann::ordered_json j;
    j["poems"] = n;
    j["pairs_scanned"] = summary.pairs_scanned;
    j["pairs_skipped"] = summary.pairs_skipped;
    j["records_emitted"] = summary.records_emitted;
    j["shards"] = options.shards;
    j["workers"] = options.workers;
    j["mode"] = std::string(to_string(options.report.mode));
    j["both_viewpoints"] = options.report.emit_both_viewpoints;
    j["min_shared_distinct"] = options.filter.min_shared_distinct;
    j["min_fragment_len"] = options.filter.min_fragment_len;
    j["wall_ms"] = static_cast<std::uint64_t>(summary.wall_seconds * 1000.0);
    {
        std::ofstream out(out_dir / "summary.json", std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write summary.json in " + out_dir.string());
        out << j.dump(2) << '\n';
    }
    {
        std::ofstream done(out_dir / "_DONE", std::ios::binary | std::ios::trunc);
        if (!done) throw Error("cannot write _DONE sentinel in " + out_dir.string());
    }
    return summary;
}

} // namespace tangsong
