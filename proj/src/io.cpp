#include "ample/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace ample {

namespace {

struct Line {
    int no;
    std::vector<std::string> tok;
};

// non-blank, non-comment lines split on whitespace
std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> out;
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        ++no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        Line l{no, {}};
        std::string t;
        while (ls >> t) l.tok.push_back(t);
        if (!l.tok.empty()) out.push_back(std::move(l));
    }
    return out;
}

long long to_ll(const Line& l, const std::string& s) {
    try {
        size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ParseError(l.no, "expected an integer, got '" + s + "'");
    }
}

Rat to_rat(const Line& l, const std::string& s) {
    try {
        return parse_rat(s);
    } catch (const std::exception&) {
        throw ParseError(l.no, "expected a rational, got '" + s + "'");
    }
}

Point to_point(const Line& l, const std::string& s, const Alphabet& a) {
    try {
        return Point::parse(s, a);
    } catch (const std::exception& e) {
        throw ParseError(l.no, "bad point '" + s + "': " + e.what());
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        auto next = s.find(sep, pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

ParsedGroupoid parse_transformation(const std::vector<Line>& lines, size_t i) {
    if (i >= lines.size() || lines[i].tok[0] != "alphabet" || lines[i].tok.size() != 2)
        throw ParseError(i < lines.size() ? lines[i].no : 0,
                         "expected 'alphabet SYMBOLS'");
    Alphabet alpha(lines[i].tok[1]);
    ++i;
    std::vector<GeneratorAction> gens;
    for (; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tok[0] == "generator") {
            if (l.tok.size() != 2) throw ParseError(l.no, "expected 'generator NAME'");
            gens.push_back(GeneratorAction{l.tok[1], {}, {}});
        } else if (l.tok[0] == "exception") {
            if (gens.empty()) throw ParseError(l.no, "exception before any generator");
            if (l.tok.size() != 4 || l.tok[2] != "->")
                throw ParseError(l.no, "expected 'exception POINT -> POINT'");
            gens.back().exceptions.push_back(
                {to_point(l, l.tok[1], alpha), to_point(l, l.tok[3], alpha)});
        } else if (l.tok.size() == 3 && l.tok[1] == "->") {
            if (gens.empty()) throw ParseError(l.no, "rule before any generator");
            if (!alpha.valid_word(l.tok[0]) || !alpha.valid_word(l.tok[2]))
                throw ParseError(l.no, "rule words must be over the alphabet");
            gens.back().rules.push_back({l.tok[0], l.tok[2]});
        } else {
            throw ParseError(l.no, "unrecognized line in transformation groupoid");
        }
    }
    ParsedGroupoid pg;
    pg.kind = GroupoidKind::Transformation;
    try {
        pg.transformation.emplace(alpha, std::move(gens));
    } catch (const std::exception& e) {
        throw ParseError(lines.empty() ? 0 : lines.back().no,
                         std::string("invalid groupoid: ") + e.what());
    }
    return pg;
}

ParsedGroupoid parse_finite(const std::vector<Line>& lines, size_t i) {
    if (i >= lines.size() || lines[i].tok[0] != "units" || lines[i].tok.size() < 2)
        throw ParseError(i < lines.size() ? lines[i].no : 0,
                         "expected 'units N [names...]'");
    const Line& ul = lines[i];
    int n = (int)to_ll(ul, ul.tok[1]);
    if (n < 1) throw ParseError(ul.no, "unit count must be positive");
    std::vector<std::string> names;
    if (ul.tok.size() == 2)
        for (int u = 0; u < n; ++u) names.push_back("u" + std::to_string(u));
    else if ((int)ul.tok.size() == 2 + n)
        names.assign(ul.tok.begin() + 2, ul.tok.end());
    else
        throw ParseError(ul.no, "expected " + std::to_string(n) + " unit names");
    auto unit_of = [&](const Line& l, const std::string& s) -> int {
        auto it = std::find(names.begin(), names.end(), s);
        if (it != names.end()) return (int)(it - names.begin());
        long long v = to_ll(l, s);
        if (v < 0 || v >= n) throw ParseError(l.no, "unit out of range: " + s);
        return (int)v;
    };

    FiniteGroupoid g;
    g.n_units = n;
    g.unit_names = names;
    std::map<std::pair<int, int>, int> by_pair;
    for (int u = 0; u < n; ++u) {
        g.src.push_back(u);
        g.dst.push_back(u);
        by_pair[{u, u}] = u;
    }
    for (++i; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tok[0] != "arrow" || l.tok.size() != 3)
            throw ParseError(l.no, "expected 'arrow SRC DST'");
        int s = unit_of(l, l.tok[1]), d = unit_of(l, l.tok[2]);
        if (by_pair.count({s, d}))
            throw ParseError(l.no, "duplicate arrow between the same units");
        by_pair[{s, d}] = (int)g.src.size();
        g.src.push_back(s);
        g.dst.push_back(d);
    }
    int m = g.num_arrows();
    g.inv.resize((size_t)m);
    for (int a = 0; a < m; ++a) {
        auto it = by_pair.find({g.dst[(size_t)a], g.src[(size_t)a]});
        if (it == by_pair.end())
            throw ParseError(lines.back().no, "arrow set is not closed under inverses");
        g.inv[(size_t)a] = it->second;
    }
    g.comp.assign((size_t)m, std::vector<int>((size_t)m, -1));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            if (g.src[(size_t)a] != g.dst[(size_t)b]) continue;
            auto it = by_pair.find({g.src[(size_t)b], g.dst[(size_t)a]});
            if (it == by_pair.end())
                throw ParseError(lines.back().no,
                                 "arrow set is not closed under composition");
            g.comp[(size_t)a][(size_t)b] = it->second;
        }
    ParsedGroupoid pg;
    pg.kind = GroupoidKind::Finite;
    pg.finite = std::move(g);
    return pg;
}

ParsedGroupoid parse_coarse(const std::vector<Line>& lines, size_t i) {
    if (i >= lines.size() || lines[i].tok[0] != "points" || lines[i].tok.size() < 2)
        throw ParseError(i < lines.size() ? lines[i].no : 0, "expected 'points NAME...'");
    std::vector<std::string> names(lines[i].tok.begin() + 1, lines[i].tok.end());
    int n = (int)names.size();
    std::vector<std::vector<Rat>> dist;
    for (++i; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tok[0] != "dist" || (int)l.tok.size() != 1 + n)
            throw ParseError(l.no,
                             "expected 'dist' with " + std::to_string(n) + " entries");
        std::vector<Rat> row;
        for (int j = 0; j < n; ++j) row.push_back(to_rat(l, l.tok[(size_t)(1 + j)]));
        dist.push_back(std::move(row));
    }
    if ((int)dist.size() != n)
        throw ParseError(lines.back().no,
                         "expected " + std::to_string(n) + " distance rows");
    ParsedGroupoid pg;
    pg.kind = GroupoidKind::Coarse;
    try {
        pg.space.emplace(std::move(names), std::move(dist));
    } catch (const std::exception& e) {
        throw ParseError(lines.back().no, std::string("invalid metric: ") + e.what());
    }
    return pg;
}

}  // namespace

ParsedGroupoid parse_groupoid_text(const std::string& text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].tok[0] != "groupoid" || lines[0].tok.size() != 2)
        throw ParseError(lines.empty() ? 1 : lines[0].no,
                         "expected header 'groupoid transformation|finite|coarse'");
    const std::string& kind = lines[0].tok[1];
    if (kind == "transformation") return parse_transformation(lines, 1);
    if (kind == "finite") return parse_finite(lines, 1);
    if (kind == "coarse") return parse_coarse(lines, 1);
    throw ParseError(lines[0].no, "unknown groupoid kind '" + kind + "'");
}

ParsedGroupoid load_groupoid(const std::string& path) {
    return parse_groupoid_text(read_file(path));
}

std::string groupoid_text(const ParsedGroupoid& pg) {
    std::ostringstream out;
    if (pg.kind == GroupoidKind::Transformation) {
        const auto& g = *pg.transformation;
        out << "groupoid transformation\n";
        out << "alphabet " << g.alphabet().symbols << "\n";
        for (const auto& ga : g.generators()) {
            out << "generator " << ga.name << "\n";
            for (const auto& r : ga.rules) out << r.first << " -> " << r.second << "\n";
            for (const auto& e : ga.exceptions)
                out << "exception " << e.first.str() << " -> " << e.second.str() << "\n";
        }
    } else if (pg.kind == GroupoidKind::Finite) {
        const auto& g = *pg.finite;
        out << "groupoid finite\nunits " << g.n_units;
        for (const auto& nm : g.unit_names) out << " " << nm;
        out << "\n";
        for (int a = g.n_units; a < g.num_arrows(); ++a)
            out << "arrow " << g.src[(size_t)a] << " " << g.dst[(size_t)a] << "\n";
    } else {
        const auto& Y = *pg.space;
        out << "groupoid coarse\npoints";
        for (const auto& nm : Y.names) out << " " << nm;
        out << "\n";
        for (int i = 0; i < Y.size(); ++i) {
            out << "dist";
            for (int j = 0; j < Y.size(); ++j) out << " " << rat_str(Y.d(i, j));
            out << "\n";
        }
    }
    return out.str();
}

ClopenSet parse_clopen(const Alphabet& a, const std::string& spec) {
    if (spec == "full" || spec == "(full)") return ClopenSet::full(a);
    if (spec == "empty" || spec == "(empty)") return ClopenSet::empty(a);
    ClopenSet out = ClopenSet::empty(a);
    for (char sep : {',', '|'})
        if (spec.find(sep) != std::string::npos) {
            for (const auto& w : split(spec, sep)) {
                if (!a.valid_word(w))
                    throw std::invalid_argument("bad cylinder word '" + w + "'");
                out = unite(out, ClopenSet::cylinder(a, w));
            }
            return out;
        }
    if (!a.valid_word(spec)) throw std::invalid_argument("bad cylinder word '" + spec + "'");
    return ClopenSet::cylinder(a, spec);
}

std::string clopen_spec(const ClopenSet& s) {
    if (s.is_empty()) return "empty";
    if (s.is_full()) return "full";
    std::string out;
    for (size_t i = 0; i < s.words().size(); ++i) {
        if (i) out += ",";
        out += s.words()[i];
    }
    return out;
}

KSpec parse_kspec(const TransformationGroupoid& g, const std::string& spec) {
    KSpec k;
    if (spec.empty() || spec == "id") return k;
    for (const auto& item : split(spec, ',')) {
        auto at = item.find('@');
        std::string wpart = item.substr(0, at);
        Word w = g.parse_word(wpart);
        ClopenSet dom = ClopenSet::full(g.alphabet());
        if (at != std::string::npos) {
            std::string dspec = item.substr(at + 1);
            // '|' separates cylinder words inside one item; ',' separates items
            dom = parse_clopen(g.alphabet(), dspec);
        }
        if (!w.is_identity()) k.elems.push_back(Bisection{std::move(w), std::move(dom)});
    }
    return k;
}

std::string kspec_spec(const TransformationGroupoid& g, const KSpec& k) {
    if (k.elems.empty()) return "id";
    auto names = g.generator_names();
    std::string out;
    for (size_t i = 0; i < k.elems.size(); ++i) {
        if (i) out += ",";
        out += k.elems[i].w.str(names);
        if (!k.elems[i].dom.is_full()) {
            std::string d = clopen_spec(k.elems[i].dom);
            std::replace(d.begin(), d.end(), ',', '|');
            out += "@" + d;
        }
    }
    return out;
}

CylinderMeasure parse_measure_text(const Alphabet& a, const std::string& text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].tok[0] != "depth" || lines[0].tok.size() != 2)
        throw ParseError(lines.empty() ? 1 : lines[0].no, "expected 'depth D' header");
    int d = (int)to_ll(lines[0], lines[0].tok[1]);
    if (d < 0) throw ParseError(lines[0].no, "depth must be nonnegative");
    CylinderMeasure mu;
    mu.alpha = a;
    mu.depth = d;
    mu.w.assign((size_t)num_words(a, d), Rat(-1));
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tok.size() != 2) throw ParseError(l.no, "expected 'CYLINDER P/Q'");
        if (!a.valid_word(l.tok[0]) || (int)l.tok[0].size() != d)
            throw ParseError(l.no, "expected a depth-" + std::to_string(d) + " cylinder");
        size_t idx = (size_t)word_index(a, l.tok[0]);
        if (mu.w[idx] >= 0) throw ParseError(l.no, "duplicate cylinder " + l.tok[0]);
        mu.w[idx] = to_rat(l, l.tok[1]);
    }
    for (size_t i = 0; i < mu.w.size(); ++i)
        if (mu.w[i] < 0)
            throw ParseError(lines.empty() ? 1 : lines.back().no,
                             "missing cylinder " + index_word(a, d, (long long)i));
    try {
        mu.validate();
    } catch (const std::exception& e) {
        throw ParseError(lines.back().no, e.what());
    }
    return mu;
}

std::string measure_text(const CylinderMeasure& mu) {
    std::ostringstream out;
    out << "depth " << mu.depth << "\n";
    for (size_t i = 0; i < mu.w.size(); ++i)
        out << index_word(mu.alpha, mu.depth, (long long)i) << " " << rat_str(mu.w[i])
            << "\n";
    return out.str();
}

CastleFile parse_castle_text(const TransformationGroupoid& g, const std::string& text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].tok[0] != "castle")
        throw ParseError(lines.empty() ? 1 : lines[0].no, "expected 'castle' header");
    CastleFile cf;
    struct Block {
        int line;
        std::map<std::pair<int, int>, Bisection> entries;
        int rows = 0;
    };
    std::vector<Block> blocks;
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tok[0] == "multisection") {
            if (l.tok.size() != 2 || to_ll(l, l.tok[1]) != (long long)blocks.size())
                throw ParseError(l.no, "expected 'multisection " +
                                           std::to_string(blocks.size()) + "'");
            blocks.push_back(Block{l.no, {}, 0});
        } else if (l.tok[0] == "ladder") {
            if (blocks.empty()) throw ParseError(l.no, "ladder before any multisection");
            if (l.tok.size() != 5)
                throw ParseError(l.no, "expected 'ladder I J WORD DOMAIN'");
            int r = (int)to_ll(l, l.tok[1]), c = (int)to_ll(l, l.tok[2]);
            if (r < 0 || c < 0) throw ParseError(l.no, "negative ladder index");
            try {
                Bisection b{g.parse_word(l.tok[3]), parse_clopen(g.alphabet(), l.tok[4])};
                if (!blocks.back().entries.emplace(std::make_pair(r, c), std::move(b))
                         .second)
                    throw std::invalid_argument("duplicate ladder entry");
            } catch (const std::exception& e) {
                throw ParseError(l.no, e.what());
            }
            blocks.back().rows = std::max(blocks.back().rows, std::max(r, c) + 1);
        } else if (l.tok[0] == "extendable-to") {
            if (l.tok.size() != 4 || l.tok[2] != "with")
                throw ParseError(l.no, "expected 'extendable-to FILE with KSPEC'");
            cf.extendable_to = l.tok[1];
            cf.kspec = l.tok[3];
        } else {
            throw ParseError(l.no, "unrecognized line in castle file");
        }
    }
    for (auto& blk : blocks) {
        int n = blk.rows;
        if (n == 0) throw ParseError(blk.line, "empty multisection");
        if ((int)blk.entries.size() == n) {
            // one full source column
            int j0 = blk.entries.begin()->first.second;
            std::vector<Bisection> col;
            for (int r = 0; r < n; ++r) {
                auto it = blk.entries.find({r, j0});
                if (it == blk.entries.end())
                    throw ParseError(blk.line, "ladder entries form neither a full "
                                               "column nor a full matrix");
                col.push_back(it->second);
            }
            try {
                cf.castle.ms.push_back(Multisection::from_column(g, std::move(col), j0));
            } catch (const std::exception& e) {
                throw ParseError(blk.line, e.what());
            }
        } else if ((long long)blk.entries.size() == (long long)n * n) {
            std::vector<Bisection> entries;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    auto it = blk.entries.find({r, c});
                    if (it == blk.entries.end())
                        throw ParseError(blk.line, "incomplete ladder matrix");
                    entries.push_back(it->second);
                }
            try {
                cf.castle.ms.push_back(Multisection::from_matrix(g, n, std::move(entries)));
            } catch (const std::exception& e) {
                throw ParseError(blk.line, e.what());
            }
        } else {
            throw ParseError(blk.line,
                             "ladder entries form neither a full column nor a full matrix");
        }
    }
    return cf;
}

std::string castle_text(const TransformationGroupoid& g, const Castle& c,
                        const std::optional<std::string>& extendable_to,
                        const std::optional<std::string>& kspec) {
    auto names = g.generator_names();
    std::ostringstream out;
    out << "castle\n";
    for (size_t p = 0; p < c.ms.size(); ++p) {
        const Multisection& m = c.ms[p];
        out << "multisection " << p << "\n";
        if (m.lazy()) {
            int j0 = m.column_base();
            for (int r = 0; r < m.size(); ++r) {
                const Bisection& b = m.column()[(size_t)r];
                out << "ladder " << r << " " << j0 << " " << b.w.str(names) << " "
                    << clopen_spec(b.dom) << "\n";
            }
        } else {
            for (int r = 0; r < m.size(); ++r)
                for (int col = 0; col < m.size(); ++col) {
                    Bisection b = m.at(g, r, col);
                    out << "ladder " << r << " " << col << " " << b.w.str(names) << " "
                        << clopen_spec(b.dom) << "\n";
                }
        }
    }
    if (extendable_to) out << "extendable-to " << *extendable_to << " with "
                           << (kspec ? *kspec : std::string("id")) << "\n";
    return out.str();
}

ComparisonWitness parse_witness_text(const TransformationGroupoid& g,
                                     const std::string& text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].tok[0] != "compare" || lines[0].tok.size() != 3)
        throw ParseError(lines.empty() ? 1 : lines[0].no,
                         "expected 'compare U-SPEC V-SPEC' header");
    ComparisonWitness w;
    try {
        w.U = parse_clopen(g.alphabet(), lines[0].tok[1]);
        w.V = parse_clopen(g.alphabet(), lines[0].tok[2]);
    } catch (const std::exception& e) {
        throw ParseError(lines[0].no, e.what());
    }
    for (size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tok[0] != "route" || l.tok.size() != 3)
            throw ParseError(l.no, "expected 'route WORD DOMAIN'");
        try {
            w.routes.push_back(
                Bisection{g.parse_word(l.tok[1]), parse_clopen(g.alphabet(), l.tok[2])});
        } catch (const std::exception& e) {
            throw ParseError(l.no, e.what());
        }
    }
    return w;
}

std::string witness_text(const TransformationGroupoid& g, const ComparisonWitness& w) {
    auto names = g.generator_names();
    std::ostringstream out;
    out << "compare " << clopen_spec(w.U) << " " << clopen_spec(w.V) << "\n";
    for (const auto& r : w.routes)
        out << "route " << r.w.str(names) << " " << clopen_spec(r.dom) << "\n";
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace ample
