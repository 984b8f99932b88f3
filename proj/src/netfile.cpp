#include "pflow/netfile.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace pflow {

ParseError::ParseError(int line_number, const std::string& message)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
      line(line_number) {}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string format_complex(const Phasor& z) {
  std::string out = format_double(z.real());
  out += (std::signbit(z.imag()) ? "-j" : "+j");
  out += format_double(std::abs(z.imag()));
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, int line) {
  double value = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "malformed number '" + tok + "'");
  return value;
}

int parse_int(const std::string& tok, int line) {
  int value = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw ParseError(line, "malformed integer '" + tok + "'");
  return value;
}

// Accepts re, re+jim, re-jim, jim, -jim.
Phasor parse_complex(const std::string& tok, int line) {
  size_t j = tok.find('j');
  if (j == std::string::npos) return {parse_double(tok, line), 0.0};
  double sign = 1.0;
  std::string re_part;
  if (j == 0) {
    re_part = "0";
  } else {
    char s = tok[j - 1];
    if (s == '+') {
      sign = 1.0;
    } else if (s == '-') {
      sign = -1.0;
    } else {
      throw ParseError(line, "malformed complex '" + tok + "'");
    }
    re_part = (j == 1) ? "0" : tok.substr(0, j - 1);
  }
  std::string im_part = tok.substr(j + 1);
  if (im_part.empty())
    throw ParseError(line, "malformed complex '" + tok + "'");
  return {parse_double(re_part, line), sign * parse_double(im_part, line)};
}

}  // namespace

NetworkDocument make_document(const Network& net) {
  NetworkDocument doc;
  doc.net = net;
  for (int ph = 0; ph < 3; ++ph)
    doc.root_polar[ph] = {std::abs(net.root_voltage[ph]),
                          rad_to_deg(std::arg(net.root_voltage[ph]))};
  return doc;
}

NetworkDocument parse_network(std::istream& in) {
  NetworkDocument doc;
  doc.net.root = -1;
  enum class Section { none, metadata, root, segments, customers };
  Section section = Section::none;
  bool version_seen = false;
  std::array<bool, 3> root_phase_seen{false, false, false};
  bool root_node_seen = false;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (size_t hash = s.find('#'); hash != std::string::npos) s.resize(hash);
    s = trim(s);
    if (s.empty()) continue;

    if (!version_seen) {
      if (s != "pflow-network v1")
        throw ParseError(line, "expected header 'pflow-network v1'");
      version_seen = true;
      continue;
    }

    if (s.front() == '[') {
      if (s == "[metadata]") section = Section::metadata;
      else if (s == "[root]") section = Section::root;
      else if (s == "[segments]") section = Section::segments;
      else if (s == "[customers]") section = Section::customers;
      else throw ParseError(line, "unknown section " + s);
      continue;
    }

    switch (section) {
      case Section::none:
        throw ParseError(line, "content before any section");

      case Section::metadata: {
        size_t eq = s.find('=');
        if (eq == std::string::npos)
          throw ParseError(line, "metadata entry needs 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) throw ParseError(line, "empty metadata key");
        doc.metadata.emplace_back(key, value);
        break;
      }

      case Section::root: {
        size_t eq = s.find('=');
        if (eq == std::string::npos)
          throw ParseError(line, "root entry needs 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::vector<std::string> val = split_ws(trim(s.substr(eq + 1)));
        if (key == "node") {
          if (val.size() != 1) throw ParseError(line, "root node wants one id");
          doc.net.root = parse_int(val[0], line);
          root_node_seen = true;
        } else if (key == "va" || key == "vb" || key == "vc") {
          if (val.size() != 2)
            throw ParseError(line, "root phasor wants 'magnitude degrees'");
          int ph = key[1] - 'a';
          double mag = parse_double(val[0], line);
          double deg = parse_double(val[1], line);
          doc.root_polar[ph] = {mag, deg};
          doc.net.root_voltage[ph] = std::polar(mag, deg_to_rad(deg));
          root_phase_seen[ph] = true;
        } else {
          throw ParseError(line, "unknown root key '" + key + "'");
        }
        break;
      }

      case Section::segments: {
        std::vector<std::string> tok = split_ws(s);
        if (tok.size() != 11)
          throw ParseError(line,
                           "segment row wants 'from to' plus 9 impedance entries");
        LineSegment seg;
        seg.from_node = parse_int(tok[0], line);
        seg.to_node = parse_int(tok[1], line);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            seg.z(r, c) = parse_complex(tok[2 + 3 * r + c], line);
        doc.net.segments.push_back(seg);
        break;
      }

      case Section::customers: {
        std::vector<std::string> tok = split_ws(s);
        if (tok.size() != 7)
          throw ParseError(
              line, "customer row wants 'id node p q z_service kind phase'");
        Customer c;
        c.id = parse_int(tok[0], line);
        c.node = parse_int(tok[1], line);
        c.p = parse_double(tok[2], line);
        c.q = parse_double(tok[3], line);
        c.z_service = parse_complex(tok[4], line);
        if (tok[5] == "psd") c.flexible = true;
        else if (tok[5] == "fixed") c.flexible = false;
        else throw ParseError(line, "customer kind must be psd or fixed");
        if (tok[6].size() != 1 || !phase_from_letter(tok[6][0], c.initial_phase))
          throw ParseError(line, "customer phase must be a, b or c");
        doc.net.customers.push_back(c);
        break;
      }
    }
  }

  if (!version_seen) throw ParseError(line, "empty document");
  if (!root_node_seen) throw ParseError(line, "missing root node");
  if (!root_phase_seen[0] || !root_phase_seen[1] || !root_phase_seen[2])
    throw ParseError(line, "missing root phasor (va, vb, vc all required)");

  doc.net.nodes.insert(doc.net.root);
  for (const LineSegment& seg : doc.net.segments) {
    doc.net.nodes.insert(seg.from_node);
    doc.net.nodes.insert(seg.to_node);
  }
  return doc;
}

NetworkDocument parse_network(const std::string& text) {
  std::istringstream is(text);
  return parse_network(is);
}

NetworkDocument load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file " + path);
  return parse_network(in);
}

std::string emit_network(const NetworkDocument& doc) {
  std::ostringstream os;
  os << "pflow-network v1\n\n";

  os << "[metadata]\n";
  for (const auto& [key, value] : doc.metadata)
    os << key << " = " << value << "\n";
  os << "\n";

  os << "[root]\n";
  os << "node = " << doc.net.root << "\n";
  const char* names[3] = {"va", "vb", "vc"};
  for (int ph = 0; ph < 3; ++ph)
    os << names[ph] << " = " << format_double(doc.root_polar[ph].first) << " "
       << format_double(doc.root_polar[ph].second) << "\n";
  os << "\n";

  os << "[segments]\n";
  os << "# from to zaa zab zac zba zbb zbc zca zcb zcc\n";
  std::vector<const LineSegment*> segs;
  for (const LineSegment& s : doc.net.segments) segs.push_back(&s);
  std::stable_sort(segs.begin(), segs.end(),
                   [](const LineSegment* lhs, const LineSegment* rhs) {
                     return std::pair(lhs->from_node, lhs->to_node) <
                            std::pair(rhs->from_node, rhs->to_node);
                   });
  for (const LineSegment* s : segs) {
    os << s->from_node << " " << s->to_node;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) os << " " << format_complex(s->z(r, c));
    os << "\n";
  }
  os << "\n";

  os << "[customers]\n";
  os << "# id node p q z_service kind phase\n";
  std::vector<const Customer*> custs;
  for (const Customer& c : doc.net.customers) custs.push_back(&c);
  std::stable_sort(custs.begin(), custs.end(),
                   [](const Customer* lhs, const Customer* rhs) {
                     return lhs->id < rhs->id;
                   });
  for (const Customer* c : custs)
    os << c->id << " " << c->node << " " << format_double(c->p) << " "
       << format_double(c->q) << " " << format_complex(c->z_service) << " "
       << (c->flexible ? "psd" : "fixed") << " " << phase_letter(c->initial_phase)
       << "\n";

  return os.str();
}

}  // namespace pflow
