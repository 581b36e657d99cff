#include <gtest/gtest.h>

#include "conspigraph/resolver.hpp"
#include "conspigraph/url.hpp"

namespace cg = conspigraph;
using cg::url::extract_urls;
using cg::url::normalize;

TEST(Extract, StripsTrailingDot) {
  auto r = extract_urls("see https://bit.ly/abc123.");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].text, "https://bit.ly/abc123");
  EXPECT_EQ(r[0].byte_offset, 4u);
}

TEST(Extract, EmptyText) { EXPECT_TRUE(extract_urls("").empty()); }

TEST(Extract, BareDomainsAreNotUrls) { EXPECT_TRUE(extract_urls("go to example.com now").empty()); }

TEST(Extract, ConcatenationIsUnionWithShiftedOffsets) {
  std::string a = "first https://a.example/x ", b = "then www.b.example/y.";
  auto ra = extract_urls(a), rb = extract_urls(b), rab = extract_urls(a + b);
  ASSERT_EQ(rab.size(), ra.size() + rb.size());
  EXPECT_EQ(rab[0].text, ra[0].text);
  EXPECT_EQ(rab[1].text, rb[0].text);
  EXPECT_EQ(rab[1].byte_offset, rb[0].byte_offset + a.size());
}

TEST(Normalize, CanonicalizesSchemeHostAndDropsFragment) {
  auto u = normalize("HTTPS://Amazon.com/dp/X?tag=a#frag");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->scheme, "https");
  EXPECT_EQ(u->host, "amazon.com");
  EXPECT_EQ(u->path, "/dp/X");
  ASSERT_EQ(u->query.size(), 1u);
  EXPECT_EQ(u->query[0].key, "tag");
  EXPECT_EQ(u->query[0].value, "a");
  EXPECT_EQ(u->to_string(), "https://amazon.com/dp/X?tag=a");
}

TEST(Normalize, WwwDefaultsToHttps) { EXPECT_EQ(normalize("www.example.com/a")->to_string(), "https://www.example.com/a"); }

TEST(Normalize, DefaultPortElided) {
  auto u = normalize("https://example.com:443/");
  ASSERT_TRUE(u);
  EXPECT_FALSE(u->port);
}

TEST(Normalize, Idempotent) {
  for (auto s : {"HTTPS://Amazon.com/dp/X?tag=a#frag", "www.Example.com/%7Efoo/./bar/../baz?b=2&a=1",
                 "http://example.com:8080/a%2fb", "https://xn--80ak6aa92e.com/"}) {
    auto once = normalize(s);
    ASSERT_TRUE(once) << s;
    auto twice = normalize(once->to_string());
    ASSERT_TRUE(twice);
    EXPECT_EQ(*once, *twice) << s;
  }
}

TEST(Normalize, QueryOrderPreserved) {
  EXPECT_EQ(normalize("https://e.com/?z=1&a=2&m=3")->to_string(), "https://e.com/?z=1&a=2&m=3");
}

TEST(Normalize, UnparseableAuthorityRejected) {
  EXPECT_FALSE(normalize("https:///nohost"));
  EXPECT_FALSE(normalize("ftp://example.com/"));
}

TEST(Shorteners, BundledListMembership) {
  const auto& list = cg::resolver::ShortenerList::bundled();
  EXPECT_TRUE(cg::resolver::is_shortened(*normalize("https://bit.ly/x"), list));
  EXPECT_TRUE(cg::resolver::is_shortened(*normalize("https://t.co/abc"), list));
  EXPECT_TRUE(cg::resolver::is_shortened(*normalize("https://ift.tt/abc"), list));
  EXPECT_TRUE(cg::resolver::is_shortened(*normalize("https://if.tt/abc"), list));
  EXPECT_FALSE(cg::resolver::is_shortened(*normalize("https://amazon.com/dp/X"), list));
}
