#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gnp/common.hpp"

namespace gnp {

// One implicit-feedback event. Ids are dense 0-based indices after ingestion.
struct Interaction {
    std::uint32_t user = 0;
    std::uint32_t item = 0;

    bool operator==(const Interaction&) const = default;
};

enum class InteractionFormat { tsv, binary };

// Ingested dataset: deduplicated interactions on dense contiguous ids, plus
// the original-id tables (dense index -> original token).
struct Dataset {
    std::vector<Interaction> interactions;
    std::uint32_t n_users = 0;
    std::uint32_t n_items = 0;
    std::vector<std::string> user_names;
    std::vector<std::string> item_names;
};

// Reads `user<TAB>item` rows (tsv) or the length-prefixed binary pair format.
// Ids are remapped to dense 0-based indices in order of first appearance and
// exact duplicate pairs are dropped. Malformed rows raise DataError with the
// line number; a dataset with no interactions raises DataError.
Dataset load_interactions(const std::string& path, InteractionFormat format);

// Binary pair format: u32 count, then count * (u32 user, u32 item), LE.
void write_interactions_binary(const std::string& path, const std::vector<Interaction>& interactions);
std::vector<Interaction> read_interactions_binary(const std::string& path);

void write_interactions_tsv(const std::string& path, const std::vector<Interaction>& interactions);

// Sidecar mapping file: `dense_index<TAB>original_id` per line.
void write_id_map(const std::string& path, const std::vector<std::string>& names);

// Plain u32 list: u32 count then ids, LE.
void write_u32_list(const std::string& path, const std::vector<std::uint32_t>& ids);
std::vector<std::uint32_t> read_u32_list(const std::string& path);

} // namespace gnp
