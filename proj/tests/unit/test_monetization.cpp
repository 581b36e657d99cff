#include <gtest/gtest.h>

#include <sstream>

#include "conspigraph/monetization.hpp"

namespace cg = conspigraph;
namespace mz = cg::monetization;
using mz::Category;

namespace {

std::optional<mz::Hit> classify(const std::string& u) {
  return mz::classify_url(*cg::url::normalize(u), mz::PlatformCatalog::bundled(), mz::ShopKeywords::bundled());
}

mz::Hit hit(Category c, std::string platform, std::string id, std::string url, cg::ChannelId ch = 1) {
  mz::Hit h;
  h.channel_id = ch;
  h.category = c;
  h.platform = std::move(platform);
  h.extracted_id = std::move(id);
  h.url = std::move(url);
  return h;
}

}  // namespace

TEST(Catalog, PaypalListedTwiceWithDiscriminators) {
  int n = 0;
  for (const auto& e : mz::PlatformCatalog::bundled().entries())
    if (e.domain == "paypal.com") {
      ++n;
      EXPECT_TRUE(e.path == "/donate" || e.path == "/pools");
    }
  EXPECT_EQ(n, 2);
}

TEST(Catalog, DuplicateEntriesRejected) {
  std::istringstream in("domain,category,platform,path\na.com,donation,A,\na.com,donation,B,\n");
  EXPECT_THROW(mz::PlatformCatalog::parse(in, "dup.csv"), cg::Error);
}

TEST(Detect, AffiliateTag) {
  auto h = classify("https://amazon.de/dp/X?tag=chan-21");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->category, Category::affiliate);
  EXPECT_EQ(h->extracted_id, "chan-21");
  EXPECT_FALSE(classify("https://amazon.com/dp/X"));
}

TEST(Detect, PatreonProfile) {
  auto h = classify("https://patreon.com/qanonanonymous");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->category, Category::donation);
  EXPECT_EQ(h->extracted_id, "qanonanonymous");
}

TEST(Detect, PaypalPoolsIsCrowdfunding) {
  auto h = classify("https://paypal.com/pools/c/abc");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->category, Category::crowdfunding);
  EXPECT_EQ(h->platform, "PayPal/pools");
}

TEST(Detect, QueryOrderAndTrackingDoNotMatter) {
  auto a = classify("https://www.paypal.com/donate?hosted_button_id=Q1&utm_source=x");
  auto b = classify("https://www.paypal.com/donate?fbclid=9&hosted_button_id=Q1");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->platform, b->platform);
  EXPECT_EQ(a->extracted_id, b->extracted_id);
}

TEST(Detect, UnknownShopifyDomainIsNotAPlatform) {
  EXPECT_FALSE(mz::detect_platform(*cg::url::normalize("https://mystore.myshopify-custom.example/products/x"),
                                   mz::PlatformCatalog::bundled()));
}

TEST(Detect, AmazonPages) {
  auto shop = classify("https://amazon.com/shop/truthseeker");
  ASSERT_TRUE(shop);
  EXPECT_EQ(shop->category, Category::shopfront);
  EXPECT_EQ(shop->extracted_id, "truthseeker");
  auto wl = classify("https://amazon.com/hz/wishlist/ls/ABC");
  ASSERT_TRUE(wl);
  EXPECT_EQ(wl->category, Category::wishlist);
  EXPECT_EQ(wl->extracted_id, "ABC");
}

TEST(Detect, CustomShopSegmentBoundary) {
  EXPECT_EQ(classify("https://shop.truthnews.example/item")->category, Category::custom_shop);
  EXPECT_EQ(classify("https://truthnews.example/donate")->category, Category::custom_shop);
  EXPECT_FALSE(classify("https://truthnews.example/prostore"));
}

TEST(Blockchain, DescriptionAndMessages) {
  cg::dataset::ChannelRecord ch;
  ch.channel_id = 7;
  ch.description = "BTC 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa";
  cg::dataset::MessageRecord m;
  m.message_id = 3;
  m.text = "eth 0x" + std::string(40, '0');
  ch.messages.push_back(m);
  auto all = mz::blockchain_hits(ch, true);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].message_id, -1);
  EXPECT_EQ(all[1].message_id, 3);
  EXPECT_EQ(mz::blockchain_hits(ch, false).size(), 1u);
}

TEST(Filter, SharedUrlsGoToReview) {
  std::vector<mz::Hit> hits = {hit(Category::donation, "Patreon", "only", "https://patreon.com/only"),
                               hit(Category::donation, "Patreon", "shared", "https://patreon.com/shared"),
                               hit(Category::donation, "Patreon", "denied", "https://patreon.com/denied")};
  std::map<std::string, std::size_t> other = {{"https://patreon.com/shared", 2}, {"https://patreon.com/denied", 1}};
  auto lists = mz::AllowDeny::parse("deny https://patreon.com/denied\nallow https://patreon.com/unknown\n", "list");
  auto r = mz::cross_community_filter(hits, other, lists);
  ASSERT_EQ(r.retained.size(), 2u);  // only + undecided shared
  EXPECT_EQ(r.retained[0].extracted_id, "only");
  EXPECT_EQ(r.discarded.size(), 1u);
  EXPECT_EQ(r.review_queue.size(), 2u);
  EXPECT_TRUE(r.flagged_for_review.contains("https://patreon.com/shared"));
}

TEST(Ecommerce, ProductKeys) {
  auto s = mz::ecommerce_sighting(*cg::url::normalize("https://www.amazon.com/gp/product/b00x4whp5e?tag=x-20"),
                                  mz::PlatformCatalog::bundled());
  ASSERT_TRUE(s);
  EXPECT_EQ(s->platform, "Amazon");
  EXPECT_EQ(s->product, "B00X4WHP5E");
  EXPECT_TRUE(s->affiliate);
}
