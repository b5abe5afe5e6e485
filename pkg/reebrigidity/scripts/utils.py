from pathlib import Path

SCENARIO_SUFFIX = ".scenario"


def collect_scenario_files(names):
    """
    Expand the command line arguments of ``reeb_rigidity run`` into scenario
    files.

    Files are taken as given; a directory contributes its ``*.scenario``
    files, sorted by name, so batch output follows a fixed order.

    :param names: paths of scenario files or directories
    :type names: list of str
    :raises FileNotFoundError: when a path does not exist
    """
    files = []
    for name in names:
        path = Path(name)
        if path.is_dir():
            files.extend(sorted(p for p in path.iterdir() if p.suffix == SCENARIO_SUFFIX and p.is_file()))
        elif path.is_file():
            files.append(path)
        else:
            raise FileNotFoundError(f"No scenario file or directory {name!r}")
    return files


def describe_sections(sections):
    """
    One line per scenario field: ``[section] key (type, required|default)``.
    """
    lines = []
    for name, section in sections.items():
        for attribute, prop in section.defined_properties().items():
            kind = type(prop).__name__.replace("Property", "").lower()
            if prop.required:
                state = "required"
            elif prop.has_default:
                state = f"default {prop.default_value()!r}"
            else:
                state = "optional"
            extra = f": {', '.join(prop.choices)}" if getattr(prop, "choices", None) else ""
            help_text = f"  {prop.help_text}" if prop.help_text else ""
            lines.append(f"[{name}] {prop.get_key(attribute)} ({kind}, {state}){extra}{help_text}")
    return lines
