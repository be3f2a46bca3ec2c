#include "sigcausal/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sigcausal/error.hpp"

namespace sigcausal {

using nlohmann::json;

namespace {

const char* mark_name(Mark m) {
    switch (m) {
        case Mark::tail: return "tail";
        case Mark::arrow: return "arrow";
        case Mark::circle: return "circle";
    }
    return "?";
}

Mark parse_mark(const std::string& s) {
    if (s == "tail") return Mark::tail;
    if (s == "arrow") return Mark::arrow;
    if (s == "circle") return Mark::circle;
    throw UsageError("unknown edge mark '" + s + "'");
}

}  // namespace

std::string digraph_to_json(const Digraph& g, int indent) {
    json edges = json::array();
    for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
    json j = {{"d", g.d()}, {"edges", std::move(edges)}, {"loops", g.loops()}};
    return j.dump(indent);
}

Digraph digraph_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        Digraph g(j.at("d").get<int>());
        for (const auto& e : j.at("edges")) {
            const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
            g.set_edge(a, b);
        }
        if (j.contains("loops"))
            for (const auto& k : j["loops"]) g.set_loop(k.get<int>());
        return g;
    } catch (const json::exception& e) {
        throw UsageError(std::string("graph JSON: ") + e.what());
    }
}

std::string mixed_graph_to_json(const MixedGraph& g, int indent) {
    json marks = json::array();
    for (const auto& e : g.edges()) marks.push_back({e.i, e.j, mark_name(e.at_i), mark_name(e.at_j)});
    NodeSet loops;
    for (int k = 0; k < g.d(); ++k)
        if (g.has_loop(k)) loops.push_back(k);
    json j = {{"d", g.d()}, {"marks", std::move(marks)}, {"loops", loops}};
    return j.dump(indent);
}

MixedGraph mixed_graph_from_json(const std::string& text) {
    try {
        json j = json::parse(text);
        int d = j.contains("d") ? j["d"].get<int>() : 0;
        if (!j.contains("d"))
            for (const auto& m : j.at("marks")) d = std::max({d, m.at(0).get<int>() + 1, m.at(1).get<int>() + 1});
        MixedGraph g(d);
        for (const auto& m : j.at("marks"))
            g.set_edge(m.at(0).get<int>(), m.at(1).get<int>(), parse_mark(m.at(2).get<std::string>()),
                       parse_mark(m.at(3).get<std::string>()));
        if (j.contains("loops"))
            for (const auto& k : j["loops"]) g.set_loop(k.get<int>());
        return g;
    } catch (const json::exception& e) {
        throw UsageError(std::string("mixed graph JSON: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open " + file.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    os << text;
    if (!text.empty() && text.back() != '\n') os << '\n';
    if (!os) throw IoError("write failed: " + file.string());
}

}  // namespace sigcausal
