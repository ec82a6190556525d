#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "align/matrix.hpp"

namespace align {

// EMB1 container format, little-endian throughout:
//   bytes  0-3   ASCII "EMB1"
//   bytes  4-11  n_samples, unsigned 64-bit
//   bytes 12-19  n_dims, unsigned 64-bit
//   then n_samples * n_dims IEEE-754 binary32 values, row-major.
//
// Writing casts the in-memory doubles to binary32; a value whose cast is not
// finite raises ValidationError. Reading widens losslessly, so
// read(write(m)) is bit-exact whenever m's values are binary32-representable.

// Returns bytes written: 4 + 8 + 8 + 4 * n_samples * n_dims.
std::size_t write_embeddings(const EmbeddingMatrix& matrix, std::ostream& destination);
std::size_t write_embeddings_file(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

EmbeddingMatrix read_embeddings(std::istream& source, Modality modality = Modality::text,
                                std::optional<int> layer = std::nullopt);
EmbeddingMatrix read_embeddings_file(const std::filesystem::path& path,
                                     Modality modality = Modality::text,
                                     std::optional<int> layer = std::nullopt);

// Reads only the EMB1 header. Used for cheap manifest validation.
struct EmbHeader {
    std::size_t n_samples = 0;
    std::size_t n_dims = 0;
};
EmbHeader read_embeddings_header(const std::filesystem::path& path);

// CSV fallback for hand-made fixtures. Header row `id,dim0,...,dimK`; one
// sample per line. Returned ids preserve file order.
struct CsvEmbeddings {
    std::vector<std::string> ids;
    EmbeddingMatrix matrix;
};
CsvEmbeddings read_embeddings_csv(const std::filesystem::path& path,
                                  Modality modality = Modality::text,
                                  std::optional<int> layer = std::nullopt);

// Dataset manifest: UTF-8 JSON
//   {"sample_ids": [...], "entries": [{"path": ..., "modality": ..., "layer": ...}]}
// All entries share the ordered sample_ids; row i of every referenced file is
// sample_ids[i]. (modality, layer) pairs are unique. Paths resolve relative
// to the manifest's directory.
struct ManifestEntry {
    std::filesystem::path path;  // resolved
    Modality modality = Modality::text;
    std::optional<int> layer;
};

struct DatasetManifest {
    std::vector<std::string> sample_ids;
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(Modality modality, std::optional<int> layer) const;
};

// Parses and validates: every referenced file exists and its row count
// equals sample_ids.size(); duplicate (modality, layer) is an error.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Loads the entry's EMB1 file stamped with its modality and layer.
EmbeddingMatrix load_entry(const DatasetManifest& manifest, const ManifestEntry& entry);

}  // namespace align
