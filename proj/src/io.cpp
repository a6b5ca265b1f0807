#include "waveseq/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace waveseq::io {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

std::vector<FastaRecord> parse_fasta(std::istream& in) {
    std::vector<FastaRecord> out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t header_line = 0;

    auto close_record = [&](std::size_t at) {
        if (!out.empty() && out.back().seq.empty())
            throw ParseError(at, "record '" + out.back().id + "' has no sequence");
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '>') {
            close_record(line_no);
            const std::string_view header = text.substr(1);
            const std::size_t cut = header.find_first_of(" \t");
            const std::string_view id = header.substr(0, cut);
            if (id.empty()) throw ParseError(line_no, "header without an id");
            out.push_back({std::string(id), {}});
            header_line = line_no;
        } else {
            if (out.empty()) throw ParseError(line_no, "sequence data before the first header");
            for (char c : text)
                if (is_space(c)) throw ParseError(line_no, "whitespace inside sequence data");
            out.back().seq.append(text);
        }
    }
    if (!out.empty() && out.back().seq.empty())
        throw ParseError(header_line + 1, "record '" + out.back().id + "' has no sequence");
    return out;
}

std::vector<Sequence> read_fasta(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    const auto records = parse_fasta(in);
    std::vector<Sequence> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(encode_sequence(r.id, r.seq));
    return out;
}

void write_fasta(std::ostream& out, std::span<const Sequence> seqs, std::size_t line_width) {
    if (line_width == 0) throw std::invalid_argument("FASTA line width must be positive");
    for (const auto& s : seqs) {
        out << '>' << s.id() << '\n';
        const std::string text = s.decode();
        for (std::size_t i = 0; i < text.size(); i += line_width)
            out << std::string_view(text).substr(i, line_width) << '\n';
    }
}

void write_fasta(const std::filesystem::path& path, std::span<const Sequence> seqs, std::size_t line_width) {
    auto out = open_out(path);
    write_fasta(out, seqs, line_width);
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::vector<Sequence> simulate_reads(const Sequence& genome, const SimSpec& spec, SimStats* stats) {
    for (double r : {spec.sub_rate, spec.ins_rate, spec.del_rate})
        if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("mutation rates must lie in [0, 1)");
    if (spec.sub_rate + spec.ins_rate + spec.del_rate >= 1.0)
        throw std::invalid_argument("mutation rates must sum to less than 1");
    if (spec.read_len == 0) throw std::invalid_argument("read length must be positive");
    if (spec.read_len > genome.size())
        throw std::invalid_argument("read length " + std::to_string(spec.read_len) +
                                    " exceeds genome length " + std::to_string(genome.size()));

    static constexpr char kBases[] = "ACGT";
    const std::string text = genome.decode();
    std::mt19937_64 rng(spec.seed);
    std::uniform_int_distribution<std::size_t> start_dist(0, genome.size() - spec.read_len);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> base(0, 3);
    std::uniform_int_distribution<int> other(1, 3);

    SimStats local;
    std::vector<Sequence> reads;
    reads.reserve(spec.count);
    std::string read;
    for (std::size_t k = 0; k < spec.count; ++k) {
        const std::size_t start = start_dist(rng);
        read.clear();
        for (std::size_t i = start; i < start + spec.read_len; ++i) {
            ++local.source_symbols;
            const double u = unit(rng);
            if (u < spec.sub_rate) {
                const char* p = std::char_traits<char>::find(kBases, 4, text[i]);
                const int cur = p ? static_cast<int>(p - kBases) : 0;
                read.push_back(kBases[(cur + other(rng)) % 4]);
                ++local.substitutions;
            } else if (u < spec.sub_rate + spec.ins_rate) {
                read.push_back(kBases[base(rng)]);
                read.push_back(text[i]);
                ++local.insertions;
            } else if (u < spec.sub_rate + spec.ins_rate + spec.del_rate) {
                ++local.deletions;
            } else {
                read.push_back(text[i]);
            }
        }
        if (read.empty()) read.push_back(text[start]);
        reads.push_back(encode_sequence("read" + std::to_string(k) + "_pos" + std::to_string(start), read));
    }
    if (stats) *stats = local;
    return reads;
}

Sequence random_genome(std::string_view id, std::size_t length, std::uint64_t seed) {
    static constexpr char kBases[] = "ACGT";
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> base(0, 3);
    std::string text(length, 'A');
    for (auto& c : text) c = kBases[base(rng)];
    return encode_sequence(id, text);
}

std::string cigar_string(const EditOps& ops) {
    std::string out;
    EditOp cur = EditOp::match;
    std::uint64_t run = 0;
    auto flush = [&] {
        if (run > 0) out += std::to_string(run) + static_cast<char>(cur);
    };
    for (const auto& r : ops) {
        if (r.len == 0) continue;
        if (run > 0 && r.op == cur) {
            run += r.len;
        } else {
            flush();
            cur = r.op;
            run = r.len;
        }
    }
    flush();
    return out;
}

std::string cigar_string(const AlignmentResult& result) { return cigar_string(result.ops); }

void write_results_tsv(std::ostream& out, std::span<const ResultRow> rows) {
    out << kTsvHeader << '\n';
    for (const auto& row : rows) {
        const AlignmentResult& r = *row.result;
        out << row.query_id << '\t' << row.subject_id << '\t' << r.score << '\t';
        if (r.has_start) out << r.q_start;
        out << '\t' << r.q_end << '\t';
        if (r.has_start) out << r.s_start;
        out << '\t' << r.s_end << '\t' << cigar_string(r) << '\n';
    }
}

void write_results_tsv(const std::filesystem::path& path, std::span<const ResultRow> rows) {
    auto out = open_out(path);
    write_results_tsv(out, rows);
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

}  // namespace waveseq::io
