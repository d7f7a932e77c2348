"""
Scenario configuration files.
Flat [section] headers followed by `key = value` lines, parsed line by line
with typed schemas. The normalized text form is echoed into run reports.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from core.config import CONFIG_DIR
from core.errors import ConfigError

SECTION_PATTERN = re.compile(r'^\[([a-z_]+)(?:\.([a-z_][a-z0-9_]*))?\]$')
ENTRY_PATTERN = re.compile(r'^([a-z_][a-z0-9_]*)\s*=\s*(.*)$')
OVERRIDE_PATTERN = re.compile(r'^([a-z_]+(?:\.[a-z_][a-z0-9_]*)?)\.([a-z_][a-z0-9_]*)=(.*)$')

OUTCOMES = ('convergent', 'non_convergent', 'singular')
VERDICTS = ('PASS', 'FAIL', 'INCONCLUSIVE')

# Section order of the normalized echo
SECTION_ORDER = ('scenario', 'flow', 'run', 'monitors', 'expect', 'refinement', 'output')


class ConfigParser:
    """Typed value parsing for configuration entries."""

    BOOLEANS = {'true': True, 'yes': True, 'on': True, 'false': False, 'no': False, 'off': False}

    @classmethod
    def literal(cls, text: str) -> Any:
        """
        Detect the type of a free-form value.

        Booleans, integers, floats and comma lists are recognized; quoted
        or other text stays a string.
        """
        text = text.strip()
        if len(text) >= 2 and text[0] == text[-1] and text[0] in '\'"':
            return text[1:-1]
        if ',' in text:
            return [cls.literal(part) for part in text.split(',') if part.strip()]
        lowered = text.lower()
        if lowered in cls.BOOLEANS:
            return cls.BOOLEANS[lowered]
        for cast in (int, float):
            try:
                return cast(text)
            except ValueError:
                pass
        return text

    @classmethod
    def boolean(cls, text: str) -> bool:
        lowered = text.strip().lower()
        if lowered not in cls.BOOLEANS:
            raise ValueError(f"expected true/false, got '{text}'")
        return cls.BOOLEANS[lowered]

    @staticmethod
    def names(text: str) -> List[str]:
        return [part.strip() for part in text.split(',') if part.strip()]

    @staticmethod
    def choice(options: Tuple[str, ...]) -> Callable[[str], str]:
        def parse(text: str) -> str:
            value = text.strip()
            if value not in options:
                raise ValueError(f"expected one of {', '.join(options)}, got '{value}'")
            return value
        return parse


# Typed schemas; None marks free keys parsed by literal detection
SECTION_SCHEMAS: Dict[str, Optional[Dict[str, Callable[[str], Any]]]] = {
    'scenario': None,
    'flow': {
        'variant': str.strip,
        'gauge': str.strip,
        'boundary': str.strip,
        'cfl': float,
        'max_step': float,
        'curvature_ceiling': float,
        'blowup_product': float,
        'mesh_floor': float,
        'gradient_bound': float,
        'max_halvings': int,
    },
    'run': {
        'horizon': float,
        'sample_every': int,        # Accepted steps between monitor samples
        'snapshot_every': int,      # Monitor samples between snapshot dumps
        'admissibility': ConfigParser.boolean,
    },
    'monitors': {
        'enabled': ConfigParser.names,
    },
    'monitor': None,
    'expect': {
        'outcome': ConfigParser.choice(OUTCOMES),
        'termination': str.strip,
    },
    'refinement': {
        'group': str.strip,
        'level': int,
        'quantity': str.strip,      # Monitor whose value enters the order fit
        'min_order': float,
    },
    'output': {
        'plots': ConfigParser.boolean,
        'snapshots': ConfigParser.boolean,
    },
}


@dataclass
class ScenarioConfig:
    """Parsed scenario configuration."""
    path: Optional[Path] = None
    sections: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    monitor_params: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    verdicts: Dict[str, str] = field(default_factory=dict)   # [expect] monitor = PASS/FAIL/...

    @property
    def name(self) -> str:
        return str(self.sections['scenario']['name'])

    @property
    def scenario_params(self) -> Dict[str, Any]:
        return {k: v for k, v in self.sections['scenario'].items() if k != 'name'}

    def section(self, name: str) -> Dict[str, Any]:
        return self.sections.get(name, {})

    @property
    def monitors(self) -> List[str]:
        return list(self.section('monitors').get('enabled', []))

    @property
    def label(self) -> str:
        """Run directory name: scenario name plus refinement level when present."""
        refinement = self.section('refinement')
        if 'level' in refinement:
            return f"{self.name}_l{refinement['level']}"
        return self.path.stem if self.path is not None else self.name

    def to_dict(self) -> Dict[str, Any]:
        return {
            'path': str(self.path) if self.path else None,
            'sections': self.sections,
            'monitor_params': self.monitor_params,
            'verdicts': self.verdicts,
        }

    def normalized_text(self) -> str:
        """Canonical text form: fixed section order, sorted keys, typed values."""
        lines: List[str] = []
        for section in SECTION_ORDER:
            entries = dict(self.sections.get(section, {}))
            if section == 'expect':
                entries.update(self.verdicts)
            if not entries:
                continue
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {_format_value(entries[key])}" for key in sorted(entries))
            lines.append('')
        for monitor in sorted(self.monitor_params):
            lines.append(f"[monitor.{monitor}]")
            params = self.monitor_params[monitor]
            lines.extend(f"{key} = {_format_value(params[key])}" for key in sorted(params))
            lines.append('')
        return '\n'.join(lines)

    def apply_overrides(self, overrides: Iterable[str]) -> 'ScenarioConfig':
        """
        Apply `section.key=value` overrides in place, typed by the same schema.

        Raises:
            ConfigError: malformed override or invalid value
        """
        for override in overrides:
            match = OVERRIDE_PATTERN.match(override.strip())
            if not match:
                raise ConfigError(f"Override must look like section.key=value, got '{override}'",
                                  field=override)
            target, key, raw = match.groups()
            section, _, sub = target.partition('.')
            _store(self, section, sub or None, key, raw, self.path, None)
        _validate(self)
        return self


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ', '.join(_format_value(v) for v in value) + (',' if len(value) == 1 else '')
    return str(value)


def _store(config: ScenarioConfig, section: str, sub: Optional[str], key: str, raw: str,
           path: Optional[Path], line: Optional[int]) -> None:
    if section not in SECTION_SCHEMAS:
        raise ConfigError(f"Unknown section [{section}]", path, line)
    if (section == 'monitor') != (sub is not None):
        raise ConfigError(f"Section [{section}{'.' + sub if sub else ''}] is not allowed", path, line)
    field_name = f"{section}.{sub + '.' if sub else ''}{key}"

    if section == 'monitor':
        config.monitor_params.setdefault(sub, {})[key] = ConfigParser.literal(raw)
        return
    if section == 'expect' and key not in SECTION_SCHEMAS['expect']:
        value = raw.strip().upper()
        if value not in VERDICTS:
            raise ConfigError(f"Expected verdict must be one of {', '.join(VERDICTS)}", path, line, field_name)
        config.verdicts[key] = value
        return

    schema = SECTION_SCHEMAS[section]
    if schema is None:
        value = ConfigParser.literal(raw)
    else:
        if key not in schema:
            raise ConfigError(f"Unknown key '{key}'", path, line, field_name)
        try:
            value = schema[key](raw)
        except ValueError as exc:
            raise ConfigError(f"Invalid value '{raw.strip()}': {exc}", path, line, field_name)
    config.sections.setdefault(section, {})[key] = value


def _validate(config: ScenarioConfig) -> None:
    if 'name' not in config.section('scenario'):
        raise ConfigError("Missing [scenario] name", config.path, field='scenario.name')
    horizon = config.section('run').get('horizon')
    if horizon is not None and horizon <= 0.0:
        raise ConfigError("Horizon must be positive", config.path, field='run.horizon')
    for monitor in config.monitor_params:
        if monitor not in config.monitors:
            raise ConfigError(f"Parameters given for monitor '{monitor}' that is not enabled",
                              config.path, field=f"monitor.{monitor}")


def parse_config_text(text: str, path: Optional[Path] = None) -> ScenarioConfig:
    """
    Parse configuration text.

    Raises:
        ConfigError: with the line number and field of the first problem
    """
    config = ScenarioConfig(path=path)
    section: Optional[str] = None
    sub: Optional[str] = None
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split('#', 1)[0].strip()
        if not line:
            continue

        header = SECTION_PATTERN.match(line)
        if header:
            section, sub = header.group(1), header.group(2)
            if section not in SECTION_SCHEMAS:
                raise ConfigError(f"Unknown section [{section}]", path, number)
            if section == 'monitor':
                config.monitor_params.setdefault(sub, {})
            continue

        entry = ENTRY_PATTERN.match(line)
        if not entry:
            raise ConfigError(f"Cannot parse '{line}'", path, number)
        if section is None:
            raise ConfigError("Entry outside of a section", path, number, entry.group(1))
        _store(config, section, sub, entry.group(1), entry.group(2), path, number)

    _validate(config)
    return config


def load_config(path) -> ScenarioConfig:
    """
    Read a configuration file; bare names resolve against the shipped configs.

    Raises:
        ConfigError: missing file or parse error
    """
    path = Path(path)
    if not path.exists() and not path.is_absolute() and (CONFIG_DIR / path).exists():
        path = CONFIG_DIR / path
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"Cannot read configuration: {exc.strerror or exc}", path)
    return parse_config_text(text, path)
