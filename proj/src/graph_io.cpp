#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qsg/error.hpp"
#include "qsg/graph.hpp"

namespace qsg {

namespace {

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    const auto first = body.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = body.find_last_not_of(" \t\r");
    return body.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& body) {
    std::istringstream in(body);
    std::vector<std::string> fields;
    std::string field;
    while (in >> field) {
        fields.push_back(field);
    }
    return fields;
}

std::size_t parse_index(const std::string& field, std::size_t line, const char* what) {
    std::size_t value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw MalformedInput(std::string("expected a non-negative integer for ") + what + ", got '" +
                                 field + "'",
                             line);
    }
    return value;
}

double parse_weight(const std::string& field, std::size_t line) {
    try {
        std::size_t used = 0;
        const double value = std::stod(field, &used);
        if (used != field.size()) {
            throw std::invalid_argument(field);
        }
        return value;
    } catch (const std::logic_error&) {
        throw MalformedInput("expected a decimal weight, got '" + field + "'", line);
    }
}

}  // namespace

WeightedGraph read_graph(std::istream& in) {
    std::string line;
    std::size_t line_number = 0;
    bool have_header = false;
    std::size_t vertices = 0;
    std::size_t expected_edges = 0;
    std::vector<Edge> edges;

    while (std::getline(in, line)) {
        ++line_number;
        const std::string body = strip_comment(line);
        if (body.empty()) {
            continue;
        }
        const auto fields = split_fields(body);
        if (!have_header) {
            if (fields.size() != 2) {
                throw MalformedInput("header must be 'M N'", line_number);
            }
            vertices = parse_index(fields[0], line_number, "M");
            expected_edges = parse_index(fields[1], line_number, "N");
            have_header = true;
            continue;
        }
        if (fields.size() != 3) {
            throw MalformedInput("edge record must be 'r s b'", line_number);
        }
        if (edges.size() == expected_edges) {
            throw MalformedInput("more edge records than the declared N = " +
                                     std::to_string(expected_edges),
                                 line_number);
        }
        Edge e{parse_index(fields[0], line_number, "r"), parse_index(fields[1], line_number, "s"),
               parse_weight(fields[2], line_number)};
        // Validate eagerly so the error points at the offending record.
        try {
            std::vector<Edge> probe = edges;
            probe.push_back(e);
            WeightedGraph check(vertices == 0 ? 1 : vertices, std::move(probe));
        } catch (const InvalidArgument& err) {
            throw MalformedInput(err.what(), line_number);
        }
        edges.push_back(e);
    }
    if (!have_header) {
        throw MalformedInput("empty graph file");
    }
    if (edges.size() != expected_edges) {
        throw MalformedInput("declared " + std::to_string(expected_edges) + " edges, found " +
                                 std::to_string(edges.size()),
                             line_number);
    }
    try {
        return WeightedGraph(vertices, std::move(edges));
    } catch (const InvalidArgument& err) {
        throw MalformedInput(err.what(), 1);
    }
}

WeightedGraph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MalformedInput("cannot open graph file '" + path + "'");
    }
    return read_graph(in);
}

void write_graph(std::ostream& out, const WeightedGraph& graph) {
    out << graph.vertex_count() << ' ' << graph.edge_count() << '\n';
    out.precision(17);
    for (const Edge& e : graph.edges()) {
        out << e.tail << ' ' << e.head << ' ' << e.weight << '\n';
    }
}

WeightedGraph generate_graph(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw InvalidArgument("generator spec must look like kind:args, got '" + std::string(spec) +
                              "'");
    }
    const std::string kind(spec.substr(0, colon));
    std::vector<std::size_t> args;
    std::string rest(spec.substr(colon + 1));
    std::istringstream in(rest);
    std::string token;
    while (std::getline(in, token, ',')) {
        try {
            args.push_back(parse_index(token, 0, "generator argument"));
        } catch (const MalformedInput&) {
            throw InvalidArgument("bad generator argument '" + token + "'");
        }
    }
    if ((kind == "path" || kind == "cycle" || kind == "star") && args.size() == 1) {
        if (kind == "path") {
            return WeightedGraph::path(args[0]);
        }
        if (kind == "cycle") {
            return WeightedGraph::cycle(args[0]);
        }
        return WeightedGraph::star(args[0]);
    }
    if (kind == "rand" && args.size() == 3) {
        return WeightedGraph::random(args[0], args[1], args[2]);
    }
    throw InvalidArgument("unknown generator '" + std::string(spec) + "'");
}

}  // namespace qsg
