"""XML-style tag extraction from agent messages.

Agents may revise their output mid-message, so extraction is last-wins: the
payload of the last well-formed (innermost) tag pair is returned.
"""

from __future__ import annotations

import re

from ..errors import TagNotFound


def _pattern(tag_name: str) -> re.Pattern:
    open_tag = re.escape(f"<{tag_name}>")
    close_tag = re.escape(f"</{tag_name}>")
    return re.compile(
        f"{open_tag}((?:(?!{open_tag})(?!{close_tag}).)*){close_tag}", re.DOTALL
    )


def find_tagged_block(text: str, tag_name: str) -> str | None:
    matches = _pattern(tag_name).findall(text)
    if not matches:
        return None
    return matches[-1].strip()


def extract_tagged_block(text: str, tag_name: str) -> str:
    payload = find_tagged_block(text, tag_name)
    if payload is None:
        raise TagNotFound(f"no well-formed <{tag_name}> block found")
    return payload
