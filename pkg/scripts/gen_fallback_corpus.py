"""Write merge scenarios whose changes no supported refactoring explains."""
import argparse
import shutil
from pathlib import Path

SHOP = """package shop;

import util.Log;

class Cart {
    // running total
    int total = 0;

    void add(int price) {
        total = total + price;
        Log.info(price);
    }

    void clear() {
        total = 0;
    }

    int size() {
        return total;
    }
}
"""

LOG = """package util;

class Log {
    static void info(int x) {
    }

    static void warn(int x) {
    }
}
"""

BASE = {"shop/Cart.mj": SHOP, "util/Log.mj": LOG, "README.txt": "cart demo\nsecond line\n"}


def edit(path, old, new):
    def f(tree):
        assert old in tree[path], (path, old)
        tree[path] = tree[path].replace(old, new, 1)
    return f


def put(path, text):
    def f(tree):
        tree[path] = text
    return f


def drop(path):
    def f(tree):
        del tree[path]
    return f


ADD_METHOD_A = "    int size() {"
ADD_PARAM = edit("shop/Cart.mj", "void clear() {", "void clear(int keep) {")

# (name, left edits, right edits)
SCENARIOS = [
    ("body-edits-disjoint", [edit("shop/Cart.mj", "total = total + price;", "total = total + price * 2;")],
     [edit("shop/Cart.mj", "        total = 0;\n    }", "        total = -1;\n    }")]),
    ("body-edits-overlap", [edit("shop/Cart.mj", "total = total + price;", "total += price;")],
     [edit("shop/Cart.mj", "total = total + price;", "total = price + total;")]),
    ("add-methods-same-spot", [edit("shop/Cart.mj", ADD_METHOD_A, "    void a() {\n    }\n\n" + ADD_METHOD_A)],
     [edit("shop/Cart.mj", ADD_METHOD_A, "    void b() {\n    }\n\n" + ADD_METHOD_A)]),
    ("add-parameter", [ADD_PARAM], [edit("shop/Cart.mj", "return total;", "return total + 1;")]),
    ("add-parameter-both", [ADD_PARAM], [edit("shop/Cart.mj", "void clear() {", "void clear(boolean hard) {")]),
    ("delete-vs-edit-method", [edit("shop/Cart.mj", "    void clear() {\n        total = 0;\n    }\n\n", "")],
     [edit("shop/Cart.mj", "        total = 0;\n    }", "        total = 1;\n    }")]),
    ("text-file-edits", [edit("README.txt", "cart demo", "cart demo v2")],
     [edit("README.txt", "second line", "second line!")]),
    ("text-file-conflict", [edit("README.txt", "cart demo", "cart")], [edit("README.txt", "cart demo", "carts")]),
    ("new-file-both-differ", [put("notes.txt", "left\n")], [put("notes.txt", "right\n")]),
    ("new-source-file-one-side", [put("shop/Bag.mj", "package shop;\n\nclass Bag {\n}\n")],
     [edit("shop/Cart.mj", "return total;", "return 0;")]),
    ("delete-modify-file", [drop("README.txt")], [edit("README.txt", "second line", "changed")]),
    ("delete-unmodified-file", [drop("README.txt")], [edit("shop/Cart.mj", "return total;", "return 2;")]),
    ("field-init-change", [edit("shop/Cart.mj", "int total = 0;", "int total = 5;")],
     [edit("shop/Cart.mj", "int total = 0;", "int total = 7;")]),
    ("return-type-change", [edit("shop/Cart.mj", "int size() {", "long size() {")],
     [edit("shop/Cart.mj", "Log.info(price);", "Log.warn(price);")]),
    ("superclass-added", [edit("util/Log.mj", "class Log {", "class Log extends Object {")],
     [edit("util/Log.mj", "static void warn(int x) {\n    }", "static void warn(int x) {\n        info(x);\n    }")]),
    ("import-added", [edit("shop/Cart.mj", "import util.Log;", "import util.Log;\nimport util.Extra;")],
     [edit("shop/Cart.mj", "// running total", "// total so far")]),
    ("formatting-only", [edit("shop/Cart.mj", "total = total + price;", "total  =  total + price;")],
     [edit("shop/Cart.mj", "void clear() {", "void clear()  {")]),
    ("comment-edits", [edit("shop/Cart.mj", "// running total", "// sum")],
     [edit("shop/Cart.mj", "// running total", "// amount")]),
    ("static-toggle", [edit("util/Log.mj", "static void warn", "void warn")],
     [edit("util/Log.mj", "static void info(int x) {\n    }", "static void info(int x) {\n        warn(x);\n    }")]),
    ("local-rename", [edit("shop/Cart.mj", "void add(int price) {\n        total = total + price;",
                           "void add(int price) {\n        int p = price;\n        total = total + p;")],
     [edit("shop/Cart.mj", "return total;", "return total * 1;")]),
    ("rewrite-and-rename", [edit("shop/Cart.mj", "    void clear() {\n        total = 0;\n    }",
                                 "    void reset() {\n        Log.warn(total);\n        Log.info(0);\n        total = 9;\n    }")],
     [edit("shop/Cart.mj", "Log.info(price);", "Log.info(total);")]),
    ("add-field-both", [edit("shop/Cart.mj", "    int total = 0;\n", "    int total = 0;\n\n    int count;\n")],
     [edit("shop/Cart.mj", "    int total = 0;\n", "    int total = 0;\n\n    int limit;\n")]),
    ("one-side-only", [edit("shop/Cart.mj", "Log.info(price);", "Log.info(price + 1);")], []),
    ("identical-edits", [edit("shop/Cart.mj", "return total;", "return total + 3;")],
     [edit("shop/Cart.mj", "return total;", "return total + 3;")]),
]


def build(out: Path):
    for name, left, right in SCENARIOS:
        d = out / name
        if d.exists():
            shutil.rmtree(d)
        trees = {"base": dict(BASE), "left": dict(BASE), "right": dict(BASE)}
        for f in left:
            f(trees["left"])
        for f in right:
            f(trees["right"])
        for side, tree in trees.items():
            for path, text in tree.items():
                p = d / side / path
                p.parent.mkdir(parents=True, exist_ok=True)
                p.write_text(text)
        (d / "manifest.txt").write_text(f"id=fallback-{name}\nnotes=unsupported changes only\n")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", type=Path, nargs="?", default=Path(__file__).resolve().parents[1] / "corpus" / "fallback")
    build(ap.parse_args().out)
