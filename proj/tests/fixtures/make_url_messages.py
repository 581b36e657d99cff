#!/usr/bin/env python3
# Writes url_messages.jsonl: 200 labeled messages for the extractor.
# Labels are written by hand per URL form (raw match + normalized string);
# the script only places forms into message templates with the trailing
# punctuation each template adds, so labels never come from a regex.
import json
import random
import sys

# (as written in the message, expected raw match, expected normalized)
FORMS = [
    ("https://bit.ly/abc123", "https://bit.ly/abc123", "https://bit.ly/abc123"),
    ("http://bit.ly/3xYzQ", "http://bit.ly/3xYzQ", "http://bit.ly/3xYzQ"),
    ("https://t.co/Xy12ab", "https://t.co/Xy12ab", "https://t.co/Xy12ab"),
    ("https://ift.tt/2kLmN0p", "https://ift.tt/2kLmN0p", "https://ift.tt/2kLmN0p"),
    ("https://tinyurl.com/y7truth", "https://tinyurl.com/y7truth", "https://tinyurl.com/y7truth"),
    ("https://goo.gl/maps/q1w2e3", "https://goo.gl/maps/q1w2e3", "https://goo.gl/maps/q1w2e3"),
    ("www.example.com/a", "www.example.com/a", "https://www.example.com/a"),
    ("www.truthnews.org", "www.truthnews.org", "https://www.truthnews.org/"),
    ("WWW.Shouting.COM/Path", "WWW.Shouting.COM/Path", "https://www.shouting.com/Path"),
    ("www.youtube.com/watch?v=dQw4w9WgXcQ", "www.youtube.com/watch?v=dQw4w9WgXcQ",
     "https://www.youtube.com/watch?v=dQw4w9WgXcQ"),
    ("https://www.youtube.com/watch?v=Zq1aB2cD3eF&t=42s", "https://www.youtube.com/watch?v=Zq1aB2cD3eF&t=42s",
     "https://www.youtube.com/watch?v=Zq1aB2cD3eF&t=42s"),
    ("https://youtu.be/Zq1aB2cD3eF", "https://youtu.be/Zq1aB2cD3eF", "https://youtu.be/Zq1aB2cD3eF"),
    ("https://www.youtube.com/channel/UCz0123456789abcdefABCD", "https://www.youtube.com/channel/UCz0123456789abcdefABCD",
     "https://www.youtube.com/channel/UCz0123456789abcdefABCD"),
    ("HTTPS://Amazon.com/dp/B00X4WHP5E?tag=chan-21#frag", "HTTPS://Amazon.com/dp/B00X4WHP5E?tag=chan-21#frag",
     "https://amazon.com/dp/B00X4WHP5E?tag=chan-21"),
    ("https://www.amazon.de/dp/3442151473?tag=wahrheit-21&linkCode=ll1", "https://www.amazon.de/dp/3442151473?tag=wahrheit-21&linkCode=ll1",
     "https://www.amazon.de/dp/3442151473?tag=wahrheit-21&linkCode=ll1"),
    ("https://example.com:443/", "https://example.com:443/", "https://example.com/"),
    ("http://example.com:80/x", "http://example.com:80/x", "http://example.com/x"),
    ("http://example.com:8080/x", "http://example.com:8080/x", "http://example.com:8080/x"),
    ("https://example.org/page#section-2", "https://example.org/page#section-2", "https://example.org/page"),
    ("https://example.org/#top", "https://example.org/#top", "https://example.org/"),
    ("https://EXAMPLE.org/CaseKept", "https://EXAMPLE.org/CaseKept", "https://example.org/CaseKept"),
    ("https://example.org", "https://example.org", "https://example.org/"),
    ("https://example.org/a/b/../c", "https://example.org/a/b/../c", "https://example.org/a/c"),
    ("https://example.org/%7Euser/%41bc", "https://example.org/%7Euser/%41bc", "https://example.org/~user/Abc"),
    ("https://example.org/search?q=a%20b&z=1&a=2", "https://example.org/search?q=a%20b&z=1&a=2",
     "https://example.org/search?q=a%20b&z=1&a=2"),
    ("https://patreon.com/qanonanonymous", "https://patreon.com/qanonanonymous", "https://patreon.com/qanonanonymous"),
    ("https://www.paypal.com/donate?hosted_button_id=ABC123", "https://www.paypal.com/donate?hosted_button_id=ABC123",
     "https://www.paypal.com/donate?hosted_button_id=ABC123"),
    ("https://www.gofundme.com/f/help-the-truckers", "https://www.gofundme.com/f/help-the-truckers",
     "https://www.gofundme.com/f/help-the-truckers"),
    ("https://www.reddit.com/r/conspiracy/comments/abc/", "https://www.reddit.com/r/conspiracy/comments/abc/",
     "https://www.reddit.com/r/conspiracy/comments/abc/"),
    ("https://boards.4chan.org/pol/thread/123", "https://boards.4chan.org/pol/thread/123",
     "https://boards.4chan.org/pol/thread/123"),
    ("https://voat.co/v/greatawakening", "https://voat.co/v/greatawakening", "https://voat.co/v/greatawakening"),
    ("https://user:pw@example.net/private", "https://user:pw@example.net/private", "https://example.net/private"),
    ("https://sub.domain.example.co.uk/path/to/file.pdf", "https://sub.domain.example.co.uk/path/to/file.pdf",
     "https://sub.domain.example.co.uk/path/to/file.pdf"),
    ("https://t.me/somechannel/1234", "https://t.me/somechannel/1234", "https://t.me/somechannel/1234"),
    ("http://192.168.0.1/admin", "http://192.168.0.1/admin", "http://192.168.0.1/admin"),
    ("https://example.com/path_with-dash~tilde", "https://example.com/path_with-dash~tilde",
     "https://example.com/path_with-dash~tilde"),
    ("https://example.com/ends-with-slash/", "https://example.com/ends-with-slash/", "https://example.com/ends-with-slash/"),
    ("https://en.wikipedia.org/wiki/Foo_(bar)", "https://en.wikipedia.org/wiki/Foo_(bar", "https://en.wikipedia.org/wiki/Foo_(bar"),
    ("https://example.com/q?x=1.", "https://example.com/q?x=1", "https://example.com/q?x=1"),
    ("https://example.com/what?!", "https://example.com/what", "https://example.com/what"),
    ("https://example.com/x'", "https://example.com/x", "https://example.com/x"),
    ("https://rumble.com/v1abc-title.html", "https://rumble.com/v1abc-title.html", "https://rumble.com/v1abc-title.html"),
    ("https://www.bitchute.com/video/AbC123xyz/", "https://www.bitchute.com/video/AbC123xyz/",
     "https://www.bitchute.com/video/AbC123xyz/"),
    ("https://odysee.com/@truth:1/episode-5:a", "https://odysee.com/@truth:1/episode-5:a",
     "https://odysee.com/@truth:1/episode-5:a"),
    ("https://ko-fi.com/truthteller", "https://ko-fi.com/truthteller", "https://ko-fi.com/truthteller"),
    ("https://www.kickstarter.com/projects/someone/a-film", "https://www.kickstarter.com/projects/someone/a-film",
     "https://www.kickstarter.com/projects/someone/a-film"),
]

# Wrappers around a form; `{}` is the URL. All added characters sit outside
# the URL grammar or are trailing punctuation that gets stripped.
WRAPS = [
    "{}",
    "see {}.",
    "see {}, then share",
    "({})",
    "[{}]",
    "{{{}}}",
    "\"{}\"",
    "'{}'",
    "link: {}!",
    "{}?",
    "{};",
    "{}:",
    "<{}>",
    "WATCH THIS {} !!!",
    "смотрите {} сейчас",
    "Schaut euch das an {} bevor es gelöscht wird",
    "{}\n\nforward to everyone",
    "\U0001F525 {} \U0001F525",
    "mira esto: {}...",
    "{}),",
]

# Wraps that end right after the URL with a stripped character would make
# the wiki form lose one more ')'; it is only placed in plain contexts.
PLAIN_WRAPS = ["{}", "see {} now", "{}\nmore text", "→ {} ←"]

NEGATIVES = [
    "",
    "just text, no links at all",
    "visit example.com for more",
    "truthnews.org/donate is not linked here",
    "ftp://files.example.com/archive.zip",
    "mailto:someone@example.com",
    "email me at bob@www.example.com please",
    "the protocol is https:// and nothing else",
    "http:// alone",
    "https://.broken",
    "www.nodots",
    "wwwexample.com",
    "swww.example.com",
    "file:///etc/passwd",
    "12.34.56 is not a url",
    "t.me/channel without scheme",
    "Telegram @somechannel mention",
    "javascript:alert(1)",
    "http:/one-slash.example.com",
    "www.",
]


def main(out):
    rng = random.Random(7)
    msgs = []

    # Every form once in a plain context.
    for text, raw, norm in FORMS:
        wrap = PLAIN_WRAPS[len(msgs) % len(PLAIN_WRAPS)]
        msgs.append((wrap.format(text), [(raw, norm)]))

    # Forms with a trailing-punctuation wrap (skip forms whose own tail
    # interacts with the wrap).
    clean = [f for f in FORMS if f[0] == f[1] and not f[0].endswith(")") and not f[0].endswith("/")]
    while len(msgs) < 120:
        f = rng.choice(clean)
        w = rng.choice(WRAPS)
        msgs.append((w.format(f[0]), [(f[1], f[2])]))

    # Several URLs per message, separated by spaces and words.
    while len(msgs) < 180:
        k = rng.randint(2, 4)
        picks = [rng.choice(clean) for _ in range(k)]
        sep = rng.choice([" ", " and ", "\n", " | ", ", ", " - "])
        text = sep.join(p[0] for p in picks)
        if sep == ", ":
            pass  # the comma is stripped from every URL but the last
        msgs.append(("Links: " + text, [(p[1], p[2]) for p in picks]))

    for n in NEGATIVES:
        msgs.append((n, []))
    assert len(msgs) == 200, len(msgs)

    with open(out, "w", encoding="utf-8") as fh:
        for text, urls in msgs:
            fh.write(json.dumps({"text": text, "urls": [{"raw": r, "normalized": n} for r, n in urls]},
                                ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "url_messages.jsonl")
