#ifndef WAVESEQ_IO_HPP
#define WAVESEQ_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "waveseq/core.hpp"

namespace waveseq::io {

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct FastaRecord {
    std::string id;   // header text up to the first whitespace
    std::string seq;  // body lines joined
};

std::vector<FastaRecord> parse_fasta(std::istream& in);
std::vector<Sequence> read_fasta(const std::filesystem::path& path);

void write_fasta(std::ostream& out, std::span<const Sequence> seqs, std::size_t line_width = 60);
void write_fasta(const std::filesystem::path& path, std::span<const Sequence> seqs,
                 std::size_t line_width = 60);

struct SimSpec {
    std::size_t count = 0;
    std::size_t read_len = 0;
    double sub_rate = 0.0;
    double ins_rate = 0.0;
    double del_rate = 0.0;
    std::uint64_t seed = 0;
};

/// Counters kept by the simulator, used to check the realized rates.
struct SimStats {
    std::uint64_t source_symbols = 0;  // genome symbols visited
    std::uint64_t substitutions = 0;
    std::uint64_t insertions = 0;
    std::uint64_t deletions = 0;
};

/// Reads from uniform start positions, mutated per symbol. Ids look like
/// "read<k>_pos<start>". Deterministic for a given seed.
std::vector<Sequence> simulate_reads(const Sequence& genome, const SimSpec& spec, SimStats* stats = nullptr);

/// Uniform random ACGT text, for simulation when no genome is supplied.
Sequence random_genome(std::string_view id, std::size_t length, std::uint64_t seed);

/// SAM-style run-length ops; M covers match and mismatch.
std::string cigar_string(const AlignmentResult& result);
std::string cigar_string(const EditOps& ops);

struct ResultRow {
    std::string_view query_id;
    std::string_view subject_id;
    const AlignmentResult* result = nullptr;
};

inline constexpr std::string_view kTsvHeader =
    "query_id\tsubject_id\tscore\tq_start\tq_end\ts_start\ts_end\tcigar";

/// Header plus one row per result. Start columns are empty when the result
/// has no start coordinates.
void write_results_tsv(std::ostream& out, std::span<const ResultRow> rows);
void write_results_tsv(const std::filesystem::path& path, std::span<const ResultRow> rows);

}  // namespace waveseq::io

#endif
