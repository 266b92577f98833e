#include "ef1r/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ef1r {

namespace {

struct Line {
    int number = 0;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream stream(text);
    std::string raw;
    int number = 0;
    while (std::getline(stream, raw)) {
        ++number;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream line_stream(raw);
        Line line;
        line.number = number;
        std::string token;
        while (line_stream >> token) line.tokens.push_back(token);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

class Reader {
  public:
    explicit Reader(const std::vector<Line>& lines) : lines_(lines) {}

    bool done() const { return pos_ >= lines_.size(); }
    const Line& peek() const {
        if (done()) throw ParseError(last_line() + 1, "unexpected end of document");
        return lines_[pos_];
    }
    const Line& next() {
        const Line& line = peek();
        ++pos_;
        return line;
    }
    int last_line() const {
        return lines_.empty() ? 0 : lines_.back().number;
    }

  private:
    const std::vector<Line>& lines_;
    std::size_t pos_ = 0;
};

std::int64_t parse_int(const Line& line, const std::string& token) {
    try {
        std::size_t used = 0;
        std::int64_t v = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line.number, "expected an integer, got '" + token + "'");
    }
}

const Line& expect(Reader& reader, const std::string& keyword) {
    const Line& line = reader.next();
    if (line.tokens[0] != keyword)
        throw ParseError(line.number, "expected '" + keyword + "', got '" +
                                          line.tokens[0] + "'");
    return line;
}

void check_id(const ItemId& id, int line) {
    if (id.empty()) throw ParseError(line, "empty item id");
}

Mode parse_mode(const Line& line, const std::string& token) {
    if (token == "goods") return Mode::Goods;
    if (token == "chores") return Mode::Chores;
    if (token == "mixed") return Mode::Mixed;
    throw ParseError(line.number, "unknown mode '" + token + "'");
}

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::Goods: return "goods";
        case Mode::Chores: return "chores";
        case Mode::Mixed: return "mixed";
    }
    return "?";
}

Valuation parse_valuation_block(Reader& reader, const Instance& inst,
                                const Line& head, const std::string& kind) {
    if (kind == "additive") {
        AdditiveValuation add;
        add.values.assign(static_cast<std::size_t>(inst.item_count()), 0);
        while (!reader.done() && reader.peek().tokens[0] == "v") {
            const Line& line = reader.next();
            if (line.tokens.size() != 3)
                throw ParseError(line.number, "expected 'v <item> <value>'");
            int g;
            try {
                g = inst.item_index(line.tokens[1]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(line.number, e.what());
            }
            add.values[static_cast<std::size_t>(g)] = parse_int(line, line.tokens[2]);
        }
        return Valuation{std::move(add)};
    }
    if (kind == "generators") {
        GeneratorValuation gv;
        while (!reader.done() && reader.peek().tokens[0] == "gen") {
            const Line& line = reader.next();
            if (line.tokens.size() < 2)
                throw ParseError(line.number, "generator set needs at least one item");
            Bundle gen;
            for (std::size_t k = 1; k < line.tokens.size(); ++k) {
                try {
                    gen.push_back(inst.item_index(line.tokens[k]));
                } catch (const std::invalid_argument& e) {
                    throw ParseError(line.number, e.what());
                }
            }
            std::sort(gen.begin(), gen.end());
            gen.erase(std::unique(gen.begin(), gen.end()), gen.end());
            gv.generators.push_back(std::move(gen));
        }
        return Valuation{std::move(gv)};
    }
    if (kind == "table") {
        if (inst.item_count() > kTableMaxItems)
            throw ParseError(head.number, "table valuations are capped at " +
                                              std::to_string(kTableMaxItems) +
                                              " items");
        TableValuation t;
        t.values.assign(std::size_t{1} << inst.item_count(), 0);
        std::vector<char> seen(t.values.size(), 0);
        while (!reader.done() && reader.peek().tokens[0] == "set") {
            const Line& line = reader.next();
            if (line.tokens.size() < 2)
                throw ParseError(line.number, "expected 'set <value> [items...]'");
            std::uint32_t mask = 0;
            for (std::size_t k = 2; k < line.tokens.size(); ++k) {
                try {
                    mask |= 1u << inst.item_index(line.tokens[k]);
                } catch (const std::invalid_argument& e) {
                    throw ParseError(line.number, e.what());
                }
            }
            if (seen[mask])
                throw ParseError(line.number, "duplicate table entry");
            seen[mask] = 1;
            t.values[mask] = parse_int(line, line.tokens[1]);
        }
        for (std::size_t mask = 0; mask < seen.size(); ++mask)
            if (!seen[mask])
                throw ParseError(head.number, "table is missing an entry");
        return Valuation{std::move(t)};
    }
    throw ParseError(head.number, "unknown valuation kind '" + kind + "'");
}

}  // namespace

ParsedInstance parse_instance(const std::string& text) {
    std::vector<Line> lines = tokenize(text);
    Reader reader(lines);

    {
        const Line& line = expect(reader, "format");
        if (line.tokens.size() != 3 || line.tokens[1] != "ef1r-instance" ||
            line.tokens[2] != "1")
            throw ParseError(line.number, "expected 'format ef1r-instance 1'");
    }

    Instance inst;
    {
        const Line& line = expect(reader, "mode");
        if (line.tokens.size() != 2)
            throw ParseError(line.number, "expected 'mode goods|chores|mixed'");
        inst.mode = parse_mode(line, line.tokens[1]);
    }
    {
        const Line& line = expect(reader, "agents");
        if (line.tokens.size() != 2)
            throw ParseError(line.number, "expected 'agents <count>'");
        inst.agent_count = static_cast<int>(parse_int(line, line.tokens[1]));
        if (inst.agent_count < 1)
            throw ParseError(line.number, "agent count must be positive");
    }
    {
        const Line& line = expect(reader, "items");
        for (std::size_t k = 1; k < line.tokens.size(); ++k) {
            check_id(line.tokens[k], line.number);
            inst.items.push_back(line.tokens[k]);
        }
        std::sort(inst.items.begin(), inst.items.end());
        if (std::adjacent_find(inst.items.begin(), inst.items.end()) !=
            inst.items.end())
            throw ParseError(line.number, "duplicate item id");
    }

    const Line& head = expect(reader, "valuation");
    if (head.tokens.size() < 2)
        throw ParseError(head.number, "expected 'valuation <scope> <kind>'");
    if (head.tokens[1] == "graphical") {
        // One whole-instance block; every agent gets an incidence valuation.
        std::vector<GraphicalValuation> vals(
            static_cast<std::size_t>(inst.agent_count),
            GraphicalValuation{
                std::vector<char>(static_cast<std::size_t>(inst.item_count()), 0)});
        while (!reader.done() && reader.peek().tokens[0] == "edge") {
            const Line& line = reader.next();
            if (line.tokens.size() != 3 && line.tokens.size() != 4)
                throw ParseError(line.number, "expected 'edge <item> <agent> [<agent>]'");
            int g;
            try {
                g = inst.item_index(line.tokens[1]);
            } catch (const std::invalid_argument& e) {
                throw ParseError(line.number, e.what());
            }
            for (std::size_t k = 2; k < line.tokens.size(); ++k) {
                int agent = static_cast<int>(parse_int(line, line.tokens[k]));
                if (agent < 0 || agent >= inst.agent_count)
                    throw ParseError(line.number, "agent index out of range");
                vals[static_cast<std::size_t>(agent)].incident[static_cast<std::size_t>(g)] = 1;
            }
            if (line.tokens.size() == 4 && line.tokens[2] == line.tokens[3])
                throw ParseError(line.number, "self-loop edge");
        }
        inst.identical = false;
        for (auto& v : vals) inst.valuations.push_back(Valuation{std::move(v)});
    } else if (head.tokens[1] == "identical") {
        if (head.tokens.size() != 3)
            throw ParseError(head.number, "expected 'valuation identical <kind>'");
        inst.identical = true;
        inst.valuations.push_back(
            parse_valuation_block(reader, inst, head, head.tokens[2]));
    } else {
        inst.identical = false;
        const Line* current = &head;
        for (int agent = 0; agent < inst.agent_count; ++agent) {
            if (current->tokens.size() != 3)
                throw ParseError(current->number, "expected 'valuation <agent> <kind>'");
            if (parse_int(*current, current->tokens[1]) != agent)
                throw ParseError(current->number,
                                 "valuation blocks must cover agents in order");
            inst.valuations.push_back(
                parse_valuation_block(reader, inst, *current, current->tokens[2]));
            if (agent + 1 < inst.agent_count) current = &expect(reader, "valuation");
        }
    }

    Allocation alloc;
    alloc.bundles.assign(static_cast<std::size_t>(inst.agent_count), {});
    for (int agent = 0; agent < inst.agent_count; ++agent) {
        const Line& line = expect(reader, "allocation");
        if (line.tokens.size() < 2)
            throw ParseError(line.number, "expected 'allocation <agent> [items...]'");
        if (parse_int(line, line.tokens[1]) != agent)
            throw ParseError(line.number, "allocation lines must cover agents in order");
        Bundle& bundle = alloc.bundles[static_cast<std::size_t>(agent)];
        for (std::size_t k = 2; k < line.tokens.size(); ++k) {
            try {
                bundle.push_back(inst.item_index(line.tokens[k]));
            } catch (const std::invalid_argument& e) {
                throw ParseError(line.number, e.what());
            }
        }
        std::sort(bundle.begin(), bundle.end());
    }
    {
        const Line& line = expect(reader, "distinguished");
        if (line.tokens.size() != 2)
            throw ParseError(line.number, "expected 'distinguished <agent>'");
        alloc.distinguished = static_cast<int>(parse_int(line, line.tokens[1]));
        if (alloc.distinguished < 0 || alloc.distinguished >= inst.agent_count)
            throw ParseError(line.number, "distinguished agent out of range");
    }
    if (!reader.done())
        throw ParseError(reader.peek().number, "unexpected trailing content");

    return ParsedInstance{std::move(inst), std::move(alloc)};
}

namespace {

void emit_valuation_block(std::ostringstream& out, const Instance& inst,
                          const Valuation& v) {
    if (const auto* add = std::get_if<AdditiveValuation>(&v.repr)) {
        for (int g = 0; g < inst.item_count(); ++g)
            out << "v " << inst.items[static_cast<std::size_t>(g)] << ' '
                << add->values[static_cast<std::size_t>(g)] << '\n';
        return;
    }
    if (const auto* gv = std::get_if<GeneratorValuation>(&v.repr)) {
        std::vector<Bundle> gens = gv->generators;
        for (Bundle& gen : gens) std::sort(gen.begin(), gen.end());
        std::sort(gens.begin(), gens.end());
        gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
        for (const Bundle& gen : gens) {
            out << "gen";
            for (int g : gen) out << ' ' << inst.items[static_cast<std::size_t>(g)];
            out << '\n';
        }
        return;
    }
    if (const auto* t = std::get_if<TableValuation>(&v.repr)) {
        for (std::size_t mask = 0; mask < t->values.size(); ++mask) {
            out << "set " << t->values[mask];
            for (int g = 0; g < inst.item_count(); ++g)
                if (mask & (std::size_t{1} << g))
                    out << ' ' << inst.items[static_cast<std::size_t>(g)];
            out << '\n';
        }
        return;
    }
    throw std::invalid_argument("valuation kind has no per-agent block form");
}

std::string valuation_kind(const Valuation& v) {
    if (std::holds_alternative<AdditiveValuation>(v.repr)) return "additive";
    if (std::holds_alternative<GeneratorValuation>(v.repr)) return "generators";
    if (std::holds_alternative<TableValuation>(v.repr)) return "table";
    return "graphical";
}

}  // namespace

std::string emit_instance(const Instance& inst, const Allocation& x) {
    std::ostringstream out;
    out << "format ef1r-instance 1\n";
    out << "mode " << mode_name(inst.mode) << '\n';
    out << "agents " << inst.agent_count << '\n';
    out << "items";
    for (const ItemId& id : inst.items) out << ' ' << id;
    out << '\n';

    bool all_graphical = !inst.identical;
    for (const Valuation& v : inst.valuations)
        if (!std::holds_alternative<GraphicalValuation>(v.repr)) all_graphical = false;

    if (all_graphical) {
        out << "valuation graphical\n";
        for (int g = 0; g < inst.item_count(); ++g) {
            std::vector<int> endpoints;
            for (int i = 0; i < inst.agent_count; ++i) {
                const auto& gr = std::get<GraphicalValuation>(inst.valuation(i).repr);
                if (gr.incident[static_cast<std::size_t>(g)]) endpoints.push_back(i);
            }
            if (endpoints.empty() || endpoints.size() > 2)
                throw std::invalid_argument(
                    "graphical item must have one or two endpoints");
            out << "edge " << inst.items[static_cast<std::size_t>(g)];
            for (int e : endpoints) out << ' ' << e;
            out << '\n';
        }
    } else if (inst.identical) {
        out << "valuation identical " << valuation_kind(inst.valuations[0]) << '\n';
        emit_valuation_block(out, inst, inst.valuations[0]);
    } else {
        for (int agent = 0; agent < inst.agent_count; ++agent) {
            const Valuation& v = inst.valuation(agent);
            out << "valuation " << agent << ' ' << valuation_kind(v) << '\n';
            emit_valuation_block(out, inst, v);
        }
    }

    for (int agent = 0; agent < inst.agent_count; ++agent) {
        out << "allocation " << agent;
        for (int g : x.bundles[static_cast<std::size_t>(agent)])
            out << ' ' << inst.items[static_cast<std::size_t>(g)];
        out << '\n';
    }
    out << "distinguished " << x.distinguished << '\n';
    return out.str();
}

std::uint64_t instance_checksum(const Instance& inst, const Allocation& x) {
    std::string doc = emit_instance(inst, x);
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : doc) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string emit_trace(const Instance& inst, const Allocation& x,
                       const std::vector<Operation>& steps) {
    std::ostringstream out;
    out << "format ef1r-trace 1\n";
    out << "instance " << std::hex << instance_checksum(inst, x) << std::dec << '\n';
    int step = 0;
    for (const Operation& op : steps) {
        out << ++step << ' ';
        if (op.kind == Operation::Kind::Transfer) {
            out << "transfer " << op.agent_a << ' ' << op.agent_b << ' '
                << inst.items[static_cast<std::size_t>(op.item_a)];
        } else {
            out << "exchange " << op.agent_a << ' ' << op.agent_b << ' '
                << inst.items[static_cast<std::size_t>(op.item_a)] << ' '
                << inst.items[static_cast<std::size_t>(op.item_b)];
        }
        out << '\n';
    }
    return out.str();
}

TraceData parse_trace(const std::string& text, const Instance& inst) {
    std::vector<Line> lines = tokenize(text);
    Reader reader(lines);
    {
        const Line& line = expect(reader, "format");
        if (line.tokens.size() != 3 || line.tokens[1] != "ef1r-trace" ||
            line.tokens[2] != "1")
            throw ParseError(line.number, "expected 'format ef1r-trace 1'");
    }
    TraceData data;
    {
        const Line& line = expect(reader, "instance");
        if (line.tokens.size() != 2)
            throw ParseError(line.number, "expected 'instance <checksum>'");
        try {
            data.checksum = std::stoull(line.tokens[1], nullptr, 16);
        } catch (const std::exception&) {
            throw ParseError(line.number, "bad checksum");
        }
    }
    int expected_step = 0;
    while (!reader.done()) {
        const Line& line = reader.next();
        if (parse_int(line, line.tokens[0]) != ++expected_step)
            throw ParseError(line.number, "steps must be numbered consecutively");
        if (line.tokens.size() < 2)
            throw ParseError(line.number, "missing operation kind");
        const std::string& kind = line.tokens[1];
        try {
            if (kind == "transfer") {
                if (line.tokens.size() != 5)
                    throw ParseError(line.number,
                                     "expected '<step> transfer <from> <to> <item>'");
                data.steps.push_back(Operation::transfer(
                    static_cast<int>(parse_int(line, line.tokens[2])),
                    static_cast<int>(parse_int(line, line.tokens[3])),
                    inst.item_index(line.tokens[4])));
            } else if (kind == "exchange") {
                if (line.tokens.size() != 6)
                    throw ParseError(
                        line.number,
                        "expected '<step> exchange <a> <b> <item-a> <item-b>'");
                data.steps.push_back(Operation::exchange(
                    static_cast<int>(parse_int(line, line.tokens[2])),
                    static_cast<int>(parse_int(line, line.tokens[3])),
                    inst.item_index(line.tokens[4]),
                    inst.item_index(line.tokens[5])));
            } else {
                throw ParseError(line.number, "unknown operation kind '" + kind + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
    }
    return data;
}

RestorationTrace replay_trace(const Instance& inst, const Allocation& start,
                              const std::vector<Operation>& steps,
                              Fairness fairness) {
    if (!is_near_fair(inst, start, fairness))
        throw std::runtime_error("trace start is not near-fair");
    RestorationTrace trace;
    trace.initial = start;
    Allocation x = start;
    int step = 0;
    for (const Operation& op : steps) {
        ++step;
        if (!is_valid(inst, x, op, fairness))
            throw std::runtime_error("trace step " + std::to_string(step) +
                                     " is not a valid operation");
        x = apply(inst, x, op);
        if (!is_near_fair(inst, x, fairness))
            throw std::runtime_error("trace prefix after step " +
                                     std::to_string(step) + " is not near-fair");
        trace.steps.push_back(op);
    }
    trace.final = x;
    return trace;
}

PmrInstance parse_pmr(const std::string& text) {
    std::vector<Line> lines = tokenize(text);
    Reader reader(lines);
    {
        const Line& line = expect(reader, "format");
        if (line.tokens.size() != 3 || line.tokens[1] != "ef1r-pmr" ||
            line.tokens[2] != "1")
            throw ParseError(line.number, "expected 'format ef1r-pmr 1'");
    }
    PmrInstance p;
    auto read_side = [&](const char* keyword, std::vector<std::string>& side) {
        const Line& line = expect(reader, keyword);
        for (std::size_t k = 1; k < line.tokens.size(); ++k) {
            check_id(line.tokens[k], line.number);
            side.push_back(line.tokens[k]);
        }
        for (std::size_t a = 0; a < side.size(); ++a)
            for (std::size_t b = a + 1; b < side.size(); ++b)
                if (side[a] == side[b])
                    throw ParseError(line.number, "duplicate vertex name");
    };
    read_side("left", p.left);
    read_side("right", p.right);

    auto left_index = [&](const Line& line, const std::string& name) {
        auto it = std::find(p.left.begin(), p.left.end(), name);
        if (it == p.left.end())
            throw ParseError(line.number, "unknown left vertex '" + name + "'");
        return static_cast<int>(it - p.left.begin());
    };
    auto right_index = [&](const Line& line, const std::string& name) {
        auto it = std::find(p.right.begin(), p.right.end(), name);
        if (it == p.right.end())
            throw ParseError(line.number, "unknown right vertex '" + name + "'");
        return static_cast<int>(it - p.right.begin());
    };

    auto read_pairs = [&](const char* keyword,
                          std::vector<std::pair<int, int>>& pairs) {
        while (!reader.done() && reader.peek().tokens[0] == keyword) {
            const Line& line = reader.next();
            if (line.tokens.size() != 3)
                throw ParseError(line.number, std::string("expected '") + keyword +
                                                  " <left> <right>'");
            pairs.push_back({left_index(line, line.tokens[1]),
                             right_index(line, line.tokens[2])});
        }
    };
    read_pairs("edge", p.edges);
    if (p.edges.empty())
        throw ParseError(reader.done() ? reader.last_line() : reader.peek().number,
                         "no edges");
    read_pairs("m0", p.m0);
    read_pairs("mstar", p.mstar);
    if (!reader.done())
        throw ParseError(reader.peek().number, "unexpected trailing content");
    return p;
}

std::string emit_pmr(const PmrInstance& p) {
    std::ostringstream out;
    out << "format ef1r-pmr 1\n";
    out << "left";
    for (const auto& name : p.left) out << ' ' << name;
    out << "\nright";
    for (const auto& name : p.right) out << ' ' << name;
    out << '\n';
    auto emit_pairs = [&](const char* keyword,
                          std::vector<std::pair<int, int>> pairs) {
        std::sort(pairs.begin(), pairs.end());
        for (auto [a, b] : pairs)
            out << keyword << ' ' << p.left[static_cast<std::size_t>(a)] << ' '
                << p.right[static_cast<std::size_t>(b)] << '\n';
    };
    emit_pairs("edge", p.edges);
    emit_pairs("m0", p.m0);
    emit_pairs("mstar", p.mstar);
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace ef1r
