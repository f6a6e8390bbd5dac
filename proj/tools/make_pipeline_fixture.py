"""Writes the synthetic diff sets and event dump under tests/fixtures/pipeline."""
import os
root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "tests", "fixtures", "pipeline")
def sha(n): return ("%040x" % (0xa11ce000 + n))
def hunk(old_start, lines, new_start=None):
    oc = sum(1 for k,_ in lines if k in " -")
    nc = sum(1 for k,_ in lines if k in " +")
    out = ["@@ -%d,%d +%d,%d @@" % (old_start, oc, new_start if new_start is not None else (old_start or 1), nc)]
    out += [k + t for k, t in lines]
    return out
def filediff(path, hunks, new=False):
    out = ["diff --git a/%s b/%s" % (path, path)]
    if new:
        out += ["new file mode 100644", "index 0000000..1111111", "--- /dev/null", "+++ b/%s" % path]
    else:
        out += ["index 1111111..2222222 100644", "--- a/%s" % path, "+++ b/%s" % path]
    for h in hunks: out += h
    return out
def commit(repo_dir, fname, n, parent, date, message, files):
    lines = ["commit " + sha(n), "parents " + parent, "date %d" % date, ""]
    lines += ["    " + l if l else "" for l in message.split("\n")]
    lines.append("")
    for f in files: lines += f
    os.makedirs(repo_dir, exist_ok=True)
    with open(os.path.join(repo_dir, fname), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

d = os.path.join(root, "diffs/acme/docs-site")
ext = "%040x" % 0xfeed
commit(d, "01-install-guide.diff", 1, ext, 1520000000, "Add installation guide", [
    filediff("docs/install.md", [hunk(0, [("+", "# Installation"), ("+", ""), ("+", "Run the installer and follow the instructions.")])], new=True)])
commit(d, "02-fix-typo-readme.diff", 2, sha(1), 1520100000, "Fix typo in README\n\nTwo spelling mistakes and a stray semicolon.\nAlso raise the required runtime version.", [
    filediff("README.md", [hunk(3, [(" ", "## Getting started"), ("-", "Please read the instalation guide before you start."), ("+", "Please read the installation guide before you start."), (" ", ""), ("-", "The tool recieves its input from a file."), ("+", "The tool receives its input from a file."), ("+", "It writes its results to standard output.")]),
                           hunk(12, [(" ", "## Requirements"), ("-", "Requires version 2.4 of the runtime."), ("+", "Requires version 3.0 of the runtime.")], 13)]),
    filediff("docs/example.md", [hunk(10, [("-", "x = load(path);"), ("+", "x = load(path)?;")])]),
])
typos = [
    ("The programm starts quickly.", "The program starts quickly."),
    ("Run the the tests first.", "Run the tests first."),
    ("See the documention for details.", "See the documentation for details."),
    ("The server is runing now.", "The server is running now."),
    ("Thanks to all contributers.", "Thanks to all contributors."),
    ("The output is writen to a file.", "The output is written to a file."),
    ("This is an exmaple.", "This is an example."),
    ("Please chek the log.", "Please check the log."),
    ("The limit is configurabel.", "The limit is configurable."),
    ("Errors are reported immediatly.", "Errors are reported immediately."),
    ("The cache is cleard on exit.", "The cache is cleared on exit."),
]
commit(d, "03-fix-typos-docs.diff", 3, sha(2), 1520200000, "Fix typos across the docs", [
    filediff("docs/guide.md", [hunk(1, [("-", s) for s, _ in typos] + [("+", t) for _, t in typos])])])
commit(d, "04-bump-version.diff", 4, sha(3), 1520300000, "Bump version to 2.1", [
    filediff("VERSION", [hunk(1, [("-", "2.0"), ("+", "2.1")])])])
commit(d, "05-fix-typo-ja.diff", 5, sha(4), 1520400000, "typo: fix the Japanese docs", [
    filediff("docs/ja/README.md", [hunk(1, [("-", "インストールの説明を読んでくだい。"), ("+", "インストールの説明を読んでください。"), (" ", ""), ("-", "See the guide for details."), ("+", "詳しくは説明書を見てください。")])]),
    filediff("docs/thanks.md", [hunk(2, [("-", "Thank you for you help with this release."), ("+", "Thank you for your help with this release.")])]),
])

d = os.path.join(root, "diffs/acme/starless")
commit(d, "01-fix-typo.diff", 11, "%040x" % 0xbeef, 1521000000, "Fix typo", [
    filediff("README.md", [hunk(1, [("-", "A smal library for parsing dates."), ("+", "A small library for parsing dates.")])])])
d = os.path.join(root, "diffs/acme/copyleft")
commit(d, "01-fix-typo.diff", 21, "%040x" % 0xcafe, 1522000000, "fix typo in usage", [
    filediff("USAGE.md", [hunk(1, [("-", "Usage: copyleft [OPTIONS] FILE..."), ("+", "Usage: copyleft [OPTIONS] FILE ...")]),
    ]),
    filediff("README.md", [hunk(1, [("-", "The program is relased under the GPL."), ("+", "The program is released under the GPL.")])])])

events = [
 '{"repo_full_name": "acme/docs-site", "stars": 5, "size_bytes": 2500000, "license": "MIT", "event_kind": "WatchEvent", "created_at": "2017-06-01T08:00:00Z"}',
 '{"repo_full_name": "acme/docs-site", "stars": 120, "size_bytes": 2500000, "license": "MIT", "event_kind": "PullRequestEvent", "created_at": "2018-03-01T12:00:00Z"}',
 '{"repo_full_name": "acme/starless", "stars": 12, "size_bytes": 3000000, "license": "mit", "event_kind": "PullRequestEvent", "created_at": "2018-05-05T09:30:00Z"}',
 '{"repo_full_name": "acme/copyleft", "stars": 800, "size_bytes": 4000000, "license": "gpl-3.0", "event_kind": "PullRequestReviewCommentEvent", "created_at": "2018-07-07T16:45:00Z"}',
 '{"repo_full_name": "acme/docs-site", "stars": 300, "size_bytes": 2600000, "license": "MIT", "event_kind": "PullRequestReviewCommentEvent", "created_at": "2019-01-10T10:00:00Z"}',
 '{"repo_full_name": "broken"',
]
with open(os.path.join(root, "events.jsonl"), "w") as fh:
    fh.write("\n".join(events) + "\n")
