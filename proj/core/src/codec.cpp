#include "secalgo/codec.hpp"

#include <sstream>

#include "secalgo/error.hpp"

namespace secalgo::codec {

namespace {

constexpr std::size_t kHeader = 5;  // tag + u32 length

// Strict UTF-8: no overlongs, no surrogates, nothing above U+10FFFF.
bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  while (i < s.size()) {
    unsigned char c = p[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t n;
    std::uint32_t cp;
    if ((c & 0xe0) == 0xc0) {
      n = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      n = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      n = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + n >= s.size()) return false;
    for (std::size_t k = 1; k <= n; ++k) {
      unsigned char cc = p[i + k];
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    if ((n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000)) return false;
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += n + 1;
  }
  return true;
}

void put_header(Bytes& out, Tag tag, std::uint32_t len) {
  out.push_back(static_cast<std::uint8_t>(tag));
  append_u32_be(out, len);
}

void encode_rec(const Value& v, Bytes& out, std::size_t depth) {
  struct Visitor {
    Bytes& out;
    std::size_t depth;

    void operator()(const Bytes& b) const {
      if (b.size() > UINT32_MAX) throw UnsupportedType("byte string too long");
      put_header(out, Tag::bytes, static_cast<std::uint32_t>(b.size()));
      append(out, b);
    }
    void operator()(const std::string& s) const {
      if (!valid_utf8(s)) throw UnsupportedType("string is not valid UTF-8");
      if (s.size() > UINT32_MAX) throw UnsupportedType("string too long");
      put_header(out, Tag::string, static_cast<std::uint32_t>(s.size()));
      out.insert(out.end(), s.begin(), s.end());
    }
    void operator()(std::int64_t i) const {
      put_header(out, Tag::integer, 8);
      auto u = static_cast<std::uint64_t>(i);
      for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(u >> shift));
    }
    void operator()(bool b) const {
      put_header(out, Tag::boolean, 1);
      out.push_back(b ? 1 : 0);
    }
    void operator()(const Tuple& t) const {
      if (depth + 1 > kMaxDepth) throw DepthExceeded("tuple nesting exceeds 32 levels");
      put_header(out, Tag::tuple, static_cast<std::uint32_t>(t.size()));
      for (const auto& e : t) encode_rec(e, out, depth + 1);
    }
  };
  std::visit(Visitor{out, depth}, v.storage());
}

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  Value read(std::size_t depth) {
    if (remaining() < kHeader) throw MalformedEncoding("truncated header");
    std::uint8_t tag = in_[pos_];
    std::uint32_t len = read_u32_be(in_.subspan(pos_ + 1, 4));
    pos_ += kHeader;
    switch (static_cast<Tag>(tag)) {
      case Tag::bytes: {
        auto body = take(len);
        return Value(Bytes(body.begin(), body.end()));
      }
      case Tag::string: {
        auto body = take(len);
        std::string s(body.begin(), body.end());
        if (!valid_utf8(s)) throw MalformedEncoding("string payload is not UTF-8");
        return Value(std::move(s));
      }
      case Tag::integer: {
        if (len != 8) throw MalformedEncoding("integer payload must be 8 bytes");
        auto body = take(8);
        std::uint64_t u = 0;
        for (auto b : body) u = (u << 8) | b;
        return Value(static_cast<std::int64_t>(u));
      }
      case Tag::boolean: {
        if (len != 1) throw MalformedEncoding("boolean payload must be 1 byte");
        auto body = take(1);
        if (body[0] > 1) throw MalformedEncoding("boolean payload must be 0 or 1");
        return Value(body[0] == 1);
      }
      case Tag::tuple: {
        if (depth + 1 > kMaxDepth) throw MalformedEncoding("tuple nesting exceeds 32 levels");
        // Every element needs at least a header; refuse counts the input
        // cannot possibly hold before allocating.
        if (len > remaining() / kHeader) throw MalformedEncoding("tuple count exceeds input");
        Tuple t;
        t.reserve(len);
        for (std::uint32_t i = 0; i < len; ++i) t.push_back(read(depth + 1));
        return Value(std::move(t));
      }
    }
    throw MalformedEncoding("unknown tag");
  }

  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  ByteView take(std::size_t n) {
    if (remaining() < n) throw MalformedEncoding("truncated payload");
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  ByteView in_;
  std::size_t pos_ = 0;
};

void debug_rec(const Value& v, std::ostringstream& os) {
  struct Visitor {
    std::ostringstream& os;
    void operator()(const Bytes& b) const { os << "b'" << hex_encode(b) << "'"; }
    void operator()(const std::string& s) const { os << '"' << s << '"'; }
    void operator()(std::int64_t i) const { os << i; }
    void operator()(bool b) const { os << (b ? "true" : "false"); }
    void operator()(const Tuple& t) const {
      os << '(';
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) os << ", ";
        debug_rec(t[i], os);
      }
      if (t.size() == 1) os << ',';
      os << ')';
    }
  };
  std::visit(Visitor{os}, v.storage());
}

}  // namespace

Tag Value::tag() const {
  static constexpr Tag kTags[] = {Tag::bytes, Tag::string, Tag::integer, Tag::boolean, Tag::tuple};
  return kTags[v_.index()];
}

const Bytes& Value::as_bytes() const {
  if (auto* p = std::get_if<Bytes>(&v_)) return *p;
  throw MalformedEncoding("expected a byte string");
}

const std::string& Value::as_string() const {
  if (auto* p = std::get_if<std::string>(&v_)) return *p;
  throw MalformedEncoding("expected a string");
}

std::int64_t Value::as_int() const {
  if (auto* p = std::get_if<std::int64_t>(&v_)) return *p;
  throw MalformedEncoding("expected an integer");
}

bool Value::as_bool() const {
  if (auto* p = std::get_if<bool>(&v_)) return *p;
  throw MalformedEncoding("expected a boolean");
}

const Tuple& Value::as_tuple() const {
  if (auto* p = std::get_if<Tuple>(&v_)) return *p;
  throw MalformedEncoding("expected a tuple");
}

const Tuple& Value::as_tuple(std::size_t arity) const {
  const auto& t = as_tuple();
  if (t.size() != arity) throw MalformedEncoding("unexpected tuple arity");
  return t;
}

Bytes encode(const Value& v) {
  Bytes out;
  encode_into(v, out);
  return out;
}

void encode_into(const Value& v, Bytes& out) { encode_rec(v, out, 0); }

Value decode(ByteView in) {
  Reader r(in);
  Value v = r.read(0);
  if (r.remaining() != 0) throw MalformedEncoding("trailing bytes after value");
  return v;
}

std::string debug_string(const Value& v) {
  std::ostringstream os;
  debug_rec(v, os);
  return os.str();
}

}  // namespace secalgo::codec
