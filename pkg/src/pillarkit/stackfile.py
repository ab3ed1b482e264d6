"""Line-oriented stack description files.

Grammar (one directive per line, ``#`` starts a comment):

    ambient <index>
    substrate <index>
    layer <index_re> [index_im] <thickness_nm>
    repeat <count> {
        ...
    }

``repeat`` blocks may nest. Layers are listed from the illuminated side.
"""

from __future__ import annotations

from .errors import ConfigError
from .multilayer import Layer, LayerStack


def _tokenize(path, text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def _parse_layer(path, number, args) -> Layer:
    if len(args) not in (2, 3):
        raise ConfigError(
            f"{path}: line {number}: layer takes '<index_re> [index_im] <thickness_nm>'"
        )
    try:
        values = [float(v) for v in args]
    except ValueError:
        raise ConfigError(f"{path}: line {number}: non-numeric layer field") from None
    if len(values) == 2:
        index, thickness = complex(values[0]), values[1]
    else:
        index, thickness = complex(values[0], values[1]), values[2]
    try:
        return Layer(index, thickness)
    except Exception as exc:
        raise ConfigError(f"{path}: line {number}: {exc}") from None


def _parse_block(path, tokens, depth: int) -> list[Layer]:
    layers: list[Layer] = []
    for number, parts in tokens:
        word = parts[0].lower()
        if word == "layer":
            layers.append(_parse_layer(path, number, parts[1:]))
        elif word == "repeat":
            if len(parts) != 3 or parts[2] != "{":
                raise ConfigError(f"{path}: line {number}: expected 'repeat <count> {{'")
            try:
                count = int(parts[1])
            except ValueError:
                raise ConfigError(f"{path}: line {number}: repeat count must be an integer") from None
            if count < 0:
                raise ConfigError(f"{path}: line {number}: repeat count must be >= 0")
            layers.extend(_parse_block(path, tokens, depth + 1) * count)
        elif word == "}":
            if depth == 0:
                raise ConfigError(f"{path}: line {number}: unmatched '}}'")
            if len(parts) != 1:
                raise ConfigError(f"{path}: line {number}: '}}' must stand alone")
            return layers
        else:
            raise ConfigError(f"{path}: line {number}: unknown directive {parts[0]!r}")
    if depth != 0:
        raise ConfigError(f"{path}: unexpected end of file inside a repeat block")
    return layers


def parse_stack(path, text: str) -> LayerStack:
    """Parse stack text; directive errors name the offending line."""
    ambient = None
    substrate = None
    body = []
    for number, parts in _tokenize(path, text):
        word = parts[0].lower()
        if word in ("ambient", "substrate"):
            if len(parts) != 2:
                raise ConfigError(f"{path}: line {number}: {word} takes one index value")
            try:
                value = float(parts[1])
            except ValueError:
                raise ConfigError(f"{path}: line {number}: non-numeric {word} index") from None
            if word == "ambient":
                if ambient is not None:
                    raise ConfigError(f"{path}: line {number}: duplicate ambient directive")
                ambient = value
            else:
                if substrate is not None:
                    raise ConfigError(f"{path}: line {number}: duplicate substrate directive")
                substrate = value
        else:
            body.append((number, parts))
    if ambient is None:
        raise ConfigError(f"{path}: missing 'ambient <index>' directive")
    if substrate is None:
        raise ConfigError(f"{path}: missing 'substrate <index>' directive")
    layers = _parse_block(path, iter(body), 0)
    try:
        return LayerStack(ambient, tuple(layers), substrate)
    except Exception as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_stack(path) -> LayerStack:
    with open(path, encoding="utf-8") as fh:
        return parse_stack(path, fh.read())
