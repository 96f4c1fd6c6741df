"""Pull the natural-language context out of a small Python module.

Run: python demos/01_extract_functions.py
"""
from sigtype.extract import SourceFile, extract_functions, parse_module

SOURCE = '''
class Inventory:
    def remove_items(self, names: list, dry_run: bool = False) -> int:
        """Remove the named items from stock.

        Args:
            names: Item names to drop.
            dry_run: Only report what would be removed.

        Returns:
            Number of removed items.
        """
        removed = [n for n in names if n in self.stock]
        return len(removed)
'''

src = SourceFile("shop", "inventory.py", SOURCE)
for fn in extract_functions(parse_module(src), src):
    print("function      ", fn.qualname, "line", fn.line)
    print("docstring     ", fn.docstring.splitlines()[0])
    for name, typ, comment in zip(fn.params, fn.param_types, fn.param_comments):
        print(f"param         {name}: {typ}  # {comment}")
    print("return type   ", fn.return_type)
    print("return comment", fn.return_comment)
    print("return exprs  ", fn.return_exprs)
