#pragma once

// Collation engine for classical Chinese poetry corpora: all-pairs shared
// string mining, record filtering, near-duplicate detection, poet mention
// networks, and word occurrence timelines.

#include "tangsong/compare_all.hpp"
#include "tangsong/corpus.hpp"
#include "tangsong/error.hpp"
#include "tangsong/filter.hpp"
#include "tangsong/findcommon.hpp"
#include "tangsong/indexer.hpp"
#include "tangsong/neardup.hpp"
#include "tangsong/record.hpp"
#include "tangsong/socialnet.hpp"
#include "tangsong/timeline.hpp"
#include "tangsong/utf8.hpp"
