#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ef1r/core.hpp"
#include "ef1r/reduction.hpp"

// Text formats: instances (with their allocation), traces, and PMR inputs.
// Emission is canonical (fixed field order, sorted item lists), so
// parse -> emit is idempotent and golden files stay stable.

namespace ef1r {

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}

    int line() const { return line_; }

  private:
    int line_;
};

struct ParsedInstance {
    Instance instance;
    Allocation allocation;
};

ParsedInstance parse_instance(const std::string& text);
std::string emit_instance(const Instance& inst, const Allocation& x);

// FNV-1a over the canonical instance document; traces embed it so a trace
// cannot be replayed against the wrong instance.
std::uint64_t instance_checksum(const Instance& inst, const Allocation& x);

struct TraceData {
    std::uint64_t checksum = 0;
    std::vector<Operation> steps;
};

std::string emit_trace(const Instance& inst, const Allocation& x,
                       const std::vector<Operation>& steps);
TraceData parse_trace(const std::string& text, const Instance& inst);

// Replays steps from `start`, requiring every step to be valid under the
// fairness notion (hence every prefix near-fair). Throws std::runtime_error
// on the first violation.
RestorationTrace replay_trace(const Instance& inst, const Allocation& start,
                              const std::vector<Operation>& steps,
                              Fairness fairness = Fairness::Ef1);

PmrInstance parse_pmr(const std::string& text);
std::string emit_pmr(const PmrInstance& p);

// Whole-file helpers; writes go through a temp file and a rename.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace ef1r
