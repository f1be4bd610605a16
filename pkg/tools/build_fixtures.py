"""Regenerate the offline fixtures shipped in src/reconchain/data/.

Scan captures follow the nmap XML schema (vulners script tables), NVD cache
entries wrap CVE API 2.0 response bodies, and the exploit mirror holds inert
placeholder files that keep only the language markers of the originals.

    python tools/build_fixtures.py
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from xml.sax.saxutils import quoteattr

DATA = Path(__file__).resolve().parents[1] / "src" / "reconchain" / "data"

# ---------------------------------------------------------------------------
# NVD records: id, published, description, (v3 key, vector, score) | None, (v2 vector, score) | None

V3_CRIT = "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H"

NVD = [
    ("CVE-2014-3120", "2014-07-28",
     "The default configuration in Elasticsearch before 1.2 enables dynamic scripting, which allows remote "
     "attackers to execute arbitrary MVEL expressions and Java code via the source parameter to _search. NOTE: "
     "this only violates the vendor's intended security policy if the user does not run Elasticsearch in its "
     "own independent virtual machine.",
     None, ("AV:N/AC:M/Au:N/C:P/I:P/A:P", 6.8)),
    ("CVE-2015-1427", "2015-02-17",
     "The Groovy scripting engine in Elasticsearch before 1.3.8 and 1.4.x before 1.4.3 allows remote attackers "
     "to bypass the sandbox protection mechanism and execute arbitrary shell commands via a crafted script.",
     ("cvssMetricV31", V3_CRIT, 9.8), ("AV:N/AC:L/Au:N/C:P/I:P/A:P", 7.5)),
    ("CVE-2017-0144", "2017-03-17",
     "The SMBv1 server in Microsoft Windows Vista SP2; Windows Server 2008 SP2 and R2 SP1; Windows 7 SP1; "
     "Windows 8.1; Windows Server 2012 Gold and R2; Windows RT 8.1; and Windows 10 Gold, 1511, and 1607; and "
     "Windows Server 2016 allows remote attackers to execute arbitrary code via crafted packets, aka \"Windows "
     "SMB Remote Code Execution Vulnerability.\" This vulnerability is different from those described in "
     "CVE-2017-0143, CVE-2017-0145, CVE-2017-0146, and CVE-2017-0148.",
     ("cvssMetricV31", "CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:H/A:H", 8.1),
     ("AV:N/AC:M/Au:N/C:C/I:C/A:C", 9.3)),
    ("CVE-2017-0143", "2017-03-17",
     "The SMBv1 server in Microsoft Windows Vista SP2; Windows Server 2008 SP2 and R2 SP1; Windows 7 SP1; "
     "Windows 8.1; Windows Server 2012 Gold and R2; Windows RT 8.1; and Windows 10 Gold, 1511, and 1607; and "
     "Windows Server 2016 allows remote attackers to execute arbitrary code via crafted packets, aka \"Windows "
     "SMB Remote Code Execution Vulnerability.\" This vulnerability is different from those described in "
     "CVE-2017-0144, CVE-2017-0145, CVE-2017-0146, and CVE-2017-0148.",
     ("cvssMetricV31", "CVSS:3.1/AV:N/AC:H/PR:N/UI:N/S:U/C:H/I:H/A:H", 8.1),
     ("AV:N/AC:M/Au:N/C:C/I:C/A:C", 9.3)),
    ("CVE-2011-2523", "2019-11-27",
     "vsftpd 2.3.4 downloaded between 20110630 and 20110703 contains a backdoor which opens a shell on port "
     "6200/tcp.",
     ("cvssMetricV31", V3_CRIT, 9.8), ("AV:N/AC:L/Au:N/C:C/I:C/A:C", 10.0)),
    ("CVE-2007-2447", "2007-05-14",
     "The MS-RPC functionality in smbd in Samba 3.0.0 through 3.0.25rc3 allows remote attackers to execute "
     "arbitrary commands via shell metacharacters involving the (1) SamrChangePassword function, when the "
     "\"username map script\" smb.conf option is enabled, and allows remote authenticated users to execute "
     "commands via shell metacharacters involving other MS-RPC functions in the (2) remote printer and (3) "
     "file share management.",
     None, ("AV:N/AC:M/Au:S/C:P/I:P/A:P", 6.0)),
    ("CVE-2004-2687", "2004-12-31",
     "distcc 2.x, as used in XCode 1.5 and others, when not configured to restrict access to the server port, "
     "allows remote attackers to execute arbitrary commands via compilation jobs, which are executed by the "
     "server without authorization checks.",
     None, ("AV:N/AC:M/Au:N/C:C/I:C/A:C", 9.3)),
    ("CVE-2010-2075", "2010-06-15",
     "UnrealIRCd 3.2.8.1, as distributed on certain mirror sites from November 2009 through June 2010, "
     "contains an externally introduced modification (Trojan Horse) in the DEBUG3_DOLOG_SYSTEM macro, which "
     "allows remote attackers to execute arbitrary commands.",
     None, ("AV:N/AC:L/Au:N/C:P/I:P/A:P", 7.5)),
    ("CVE-2008-5161", "2008-11-19",
     "Error handling in the SSH protocol in SSH Tectia Client and Server and Connector, and OpenSSH 4.7p1 and "
     "possibly other versions, when using a block cipher algorithm in Cipher Block Chaining (CBC) mode, makes "
     "it easier for remote attackers to recover certain plaintext data from an arbitrary block of ciphertext "
     "in an SSH session via unknown vectors.",
     None, ("AV:N/AC:H/Au:N/C:P/I:N/A:N", 2.6)),
    ("CVE-2010-4478", "2010-12-06",
     "OpenSSH 5.6 and earlier, when J-PAKE is enabled, does not properly validate the public parameters in the "
     "J-PAKE protocol, which allows remote attackers to bypass the need for knowledge of the shared secret, "
     "and successfully authenticate, by sending crafted values in each round of the protocol, a related issue "
     "to CVE-2010-4252.",
     None, ("AV:N/AC:L/Au:N/C:P/I:P/A:P", 7.5)),
    ("CVE-2015-5600", "2015-08-03",
     "The kbdint_next_device function in auth2-chall.c in sshd in OpenSSH through 6.9 does not properly "
     "restrict the processing of keyboard-interactive devices within a single connection, which makes it "
     "easier for remote attackers to conduct brute-force attacks or cause a denial of service (CPU "
     "consumption) via a long and duplicative list in the ssh -oKbdInteractiveDevices option.",
     None, ("AV:N/AC:L/Au:N/C:P/I:N/A:C", 8.5)),
    ("CVE-2011-3192", "2011-08-29",
     "The byterange filter in the Apache HTTP Server 1.3.x, 2.0.x through 2.0.64, and 2.2.x through 2.2.19 "
     "allows remote attackers to cause a denial of service (memory and CPU consumption) via a Range header "
     "that expresses multiple overlapping ranges, as exploited in the wild in August 2011, a different "
     "vulnerability than CVE-2007-0086.",
     None, ("AV:N/AC:L/Au:N/C:N/I:N/A:C", 7.8)),
    ("CVE-2007-6750", "2011-12-27",
     "The Apache HTTP Server 1.x and 2.x allows remote attackers to cause a denial of service (daemon outage) "
     "via partial HTTP requests, as demonstrated by Slowloris, related to the lack of the mod_reqtimeout "
     "module in versions before 2.2.15.",
     None, ("AV:N/AC:L/Au:N/C:N/I:N/A:P", 5.0)),
    ("CVE-2015-3306", "2015-05-18",
     "The mod_copy module in ProFTPD 1.3.5 allows remote attackers to read and write to arbitrary files via "
     "the site cpfr and site cpto commands.",
     ("cvssMetricV31", V3_CRIT, 9.8), ("AV:N/AC:L/Au:N/C:C/I:C/A:C", 10.0)),
    ("CVE-2016-0777", "2016-01-14",
     "The resend_bytes function in roaming_common.c in the client in OpenSSH 5.x, 6.x, and 7.x before 7.1p2 "
     "allows remote servers to obtain sensitive information from process memory by requesting transmission "
     "of an entire buffer, as demonstrated by reading a private key.",
     ("cvssMetricV31", "CVSS:3.1/AV:N/AC:L/PR:L/UI:N/S:U/C:H/I:N/A:N", 6.5),
     ("AV:N/AC:L/Au:S/C:P/I:N/A:N", 4.0)),
    ("CVE-2017-7679", "2017-07-20",
     "In Apache httpd 2.2.x before 2.2.33 and 2.4.x before 2.4.26, mod_mime can read one byte past the end of "
     "a buffer when sending a malicious Content-Type response header.",
     ("cvssMetricV30", "CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 9.8),
     ("AV:N/AC:L/Au:N/C:P/I:P/A:P", 7.5)),
    ("CVE-2014-0226", "2014-07-20",
     "Race condition in the mod_status module in the Apache HTTP Server before 2.4.10 allows remote attackers "
     "to cause a denial of service (heap-based buffer overflow), or possibly obtain sensitive credential "
     "information or execute arbitrary code, via a crafted request that triggers improper scoreboard "
     "handling within the status_handler function in modules/generators/mod_status.c.",
     None, ("AV:N/AC:M/Au:N/C:P/I:P/A:P", 6.8)),
    ("CVE-2014-6271", "2014-09-24",
     "GNU Bash through 4.3 processes trailing strings after function definitions in the values of environment "
     "variables, which allows remote attackers to execute arbitrary code via a crafted environment, as "
     "demonstrated by vectors involving the ForceCommand feature in OpenSSH sshd, the mod_cgi and mod_cgid "
     "modules in the Apache HTTP Server, and other situations in which setting the environment occurs across "
     "a privilege boundary from Bash execution, aka \"ShellShock.\"",
     ("cvssMetricV31", V3_CRIT, 9.8), ("AV:N/AC:L/Au:N/C:C/I:C/A:C", 10.0)),
]


def _v3_severity(score):
    return "CRITICAL" if score >= 9 else "HIGH" if score >= 7 else "MEDIUM" if score >= 4 else "LOW"


def _v2_severity(score):
    return "HIGH" if score >= 7 else "MEDIUM" if score >= 4 else "LOW"


def nvd_response(cve_id, published, description, v3, v2):
    metrics = {}
    if v3:
        key, vector, score = v3
        metrics[key] = [{
            "source": "nvd@nist.gov",
            "type": "Primary",
            "cvssData": {
                "version": vector.split("/")[0].split(":")[1],
                "vectorString": vector,
                "baseScore": score,
                "baseSeverity": _v3_severity(score),
            },
        }]
    if v2:
        vector, score = v2
        metrics["cvssMetricV2"] = [{
            "source": "nvd@nist.gov",
            "type": "Primary",
            "cvssData": {"version": "2.0", "vectorString": vector, "baseScore": score},
            "baseSeverity": _v2_severity(score),
        }]
    body = {
        "resultsPerPage": 1,
        "startIndex": 0,
        "totalResults": 1,
        "format": "NVD_CVE",
        "version": "2.0",
        "timestamp": "2023-08-01T08:00:00.000",
        "vulnerabilities": [{
            "cve": {
                "id": cve_id,
                "sourceIdentifier": "cve@mitre.org",
                "published": f"{published}T00:00:00.000",
                "lastModified": "2023-08-01T00:00:00.000",
                "vulnStatus": "Analyzed",
                "descriptions": [{"lang": "en", "value": description}],
                "metrics": metrics,
            }
        }],
    }
    return json.dumps(body, separators=(",", ":"))


def write_nvd_cache():
    out = DATA / "nvd_cache"
    out.mkdir(parents=True, exist_ok=True)
    for row in NVD:
        envelope = {
            "api_version": "2.0",
            "fetched_at": "2023-08-01T08:00:00Z",
            "response": nvd_response(*row),
        }
        (out / f"{row[0]}.json").write_text(json.dumps(envelope, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# nmap captures


def vulners_script(cpe, rows):
    output = "\n  " + cpe + ": \n" + "".join(f"    \t{i}\t{c}\thttps://vulners.com/{t}/{i}\n" for i, c, t, _ in rows)
    lines = [f'<script id="vulners" output={quoteattr(output)}>', f'<table key="{cpe}">']
    for ident, cvss, kind, is_exploit in rows:
        lines += [
            "<table>",
            f'<elem key="is_exploit">{"true" if is_exploit else "false"}</elem>',
            f'<elem key="cvss">{cvss}</elem>',
            f'<elem key="id">{ident}</elem>',
            f'<elem key="type">{kind}</elem>',
            "</table>",
        ]
    lines += ["</table>", "</script>"]
    return "\n".join(lines)


def cve_rows(*ids, extra=()):
    scores = {r[0]: (r[3] or (None, None, r[4][1]))[2] if r[3] else r[4][1] for r in NVD}
    rows = [(i, scores.get(i, 5.0), "cve", False) for i in ids]
    return rows + list(extra)


def port_xml(portid, name, product="", version="", extrainfo="", cpe=None, rows=None, state="open", proto="tcp"):
    attrs = f'name="{name}"'
    if product:
        attrs += f' product={quoteattr(product)}'
    if version:
        attrs += f' version={quoteattr(version)}'
    if extrainfo:
        attrs += f' extrainfo={quoteattr(extrainfo)}'
    parts = [
        f'<port protocol="{proto}" portid="{portid}">',
        f'<state state="{state}" reason="syn-ack" reason_ttl="63"/>',
        f'<service {attrs} method="probed" conf="10">' + (f"<cpe>{cpe}</cpe>" if cpe else "") + "</service>",
    ]
    if rows:
        parts.append(vulners_script(cpe, rows))
    parts.append("</port>")
    return "\n".join(parts)


def host_xml(address, start, ports, os_matches=(), state="up"):
    body = [
        f'<host starttime="{start}" endtime="{start + 300}">',
        f'<status state="{state}" reason="user-set" reason_ttl="0"/>',
        f'<address addr="{address}" addrtype="ipv4"/>',
        "<hostnames>\n</hostnames>",
    ]
    if state == "up":
        body.append("<ports>" + "\n".join(ports) + "</ports>")
        if os_matches:
            body.append("<os>")
            for name, accuracy in os_matches:
                body.append(f'<osmatch name={quoteattr(name)} accuracy="{accuracy}" line="1">\n</osmatch>')
            body.append("</os>")
    body.append("</host>")
    return "\n".join(body)


def nmaprun(args, start, hosts):
    up = sum(1 for h in hosts if 'state="up"' in h)
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        "<!DOCTYPE nmaprun>\n"
        f'<nmaprun scanner="nmap" args={quoteattr(args)} start="{start}" version="7.94" xmloutputversion="1.05">\n'
        '<scaninfo type="syn" protocol="tcp" numservices="1000" services="1-1000"/>\n'
        + "\n".join(hosts)
        + f'\n<runstats><finished time="{start + 900}" exit="success"/>'
        f'<hosts up="{up}" down="{len(hosts) - up}" total="{len(hosts)}"/></runstats>\n'
        "</nmaprun>\n"
    )


NON_CVE = [
    ("EDB-ID:33370", 6.8, "exploitdb", True),
    ("1337DAY-ID-22292", 7.5, "zdt", True),
    ("MSF:EXPLOIT-MULTI-ELASTICSEARCH-SCRIPT_MVEL_RCE-", 6.8, "metasploit", True),
]


def write_scans():
    out = DATA / "scans"
    out.mkdir(parents=True, exist_ok=True)
    t0 = 1690876800  # 2023-08-01T08:00:00Z

    host_a = host_xml("10.0.2.15", t0, [
        port_xml(21, "ftp", "Microsoft ftpd", cpe="cpe:/o:microsoft:windows"),
        port_xml(445, "microsoft-ds", "Microsoft Windows Server 2008 R2 - 2012 microsoft-ds",
                 cpe="cpe:/o:microsoft:windows_server_2008:r2",
                 rows=cve_rows("CVE-2017-0144", "CVE-2017-0143", extra=[("MS17-010", 9.3, "msbulletin", False)])),
        port_xml(9200, "http", "Elasticsearch REST API", "1.1.1", "name: Hulk; cluster: elasticsearch; Lucene 4.7",
                 cpe="cpe:/a:elasticsearch:elasticsearch:1.1.1",
                 rows=cve_rows("CVE-2014-3120", "CVE-2015-1427", extra=NON_CVE)),
    ], os_matches=[("Microsoft Windows 7 SP1", 91), ("Microsoft Windows Server 2008 R2 SP1", 96)])

    host_b = host_xml("10.0.3.10", t0 + 60, [
        port_xml(3632, "distccd", "distccd", "v1", "(GNU) 4.2.4 (Ubuntu 4.2.4-1ubuntu4)",
                 cpe="cpe:/a:samba:distcc", rows=cve_rows("CVE-2004-2687")),
        port_xml(22, "ssh", "OpenSSH", "4.7p1 Debian 8ubuntu1", "protocol 2.0", cpe="cpe:/a:openbsd:openssh:4.7p1",
                 rows=cve_rows("CVE-2010-4478", "CVE-2015-5600", "CVE-2008-5161",
                               extra=[("SSV:78173", 7.8, "seebug", True)])),
        port_xml(21, "ftp", "vsftpd", "2.3.4", cpe="cpe:/a:vsftpd:vsftpd:2.3.4",
                 rows=cve_rows("CVE-2011-2523", extra=[("EDB-ID:49757", 10.0, "exploitdb", True)])),
        port_xml(80, "http", "Apache httpd", "2.2.8", "(Ubuntu) DAV/2", cpe="cpe:/a:apache:http_server:2.2.8",
                 rows=cve_rows("CVE-2011-3192", "CVE-2007-6750", extra=[("PACKETSTORM:126851", 5.0, "packetstorm", True)])),
        port_xml(139, "netbios-ssn", "Samba smbd", "3.0.20-Debian", "workgroup: WORKGROUP",
                 cpe="cpe:/a:samba:samba:3.0.20", rows=cve_rows("CVE-2007-2447")),
        port_xml(6667, "irc", "UnrealIRCd", cpe="cpe:/a:unrealircd:unrealircd",
                 rows=cve_rows("CVE-2010-2075")),
        port_xml(5432, "postgresql", state="closed"),
    ], os_matches=[("Linux 2.6.9 - 2.6.33", 100)])

    host_c = host_xml("10.0.3.20", t0 + 180, [
        port_xml(21, "ftp", "ProFTPD", "1.3.5", cpe="cpe:/a:proftpd:proftpd:1.3.5",
                 rows=cve_rows("CVE-2015-3306")),
        port_xml(22, "ssh", "OpenSSH", "6.6.1p1 Ubuntu 2ubuntu2.13", "Ubuntu Linux; protocol 2.0",
                 cpe="cpe:/a:openbsd:openssh:6.6.1p1", rows=cve_rows("CVE-2015-5600", "CVE-2016-0777")),
        port_xml(80, "http", "Apache httpd", "2.4.7", "(Ubuntu)", cpe="cpe:/a:apache:http_server:2.4.7",
                 rows=cve_rows("CVE-2017-7679", "CVE-2014-0226", "CVE-2014-6271")),
        port_xml(3306, "mysql", state="filtered"),
    ], os_matches=[("Linux 3.2 - 4.9", 95)])

    host_down = host_xml("10.0.3.99", t0 + 240, [], state="down")
    args = "nmap -Pn -n -sV -O --script vulners -p 1-65535 -oX - 10.0.2.15 10.0.3.10 10.0.3.20 10.0.3.99"
    (out / "three_hosts.xml").write_text(nmaprun(args, t0, [host_a, host_b, host_c, host_down]), encoding="utf-8")

    # Elasticsearch host alone: 12 CVE rows, two of them repeated, plus non-CVE ids
    es_ids = [
        "CVE-2014-3120", "CVE-2015-1427", "CVE-2015-3337", "CVE-2015-5531", "CVE-2015-4165",
        "CVE-2014-6439", "CVE-2015-5377", "cve-2014-3120", "CVE-2016-10033",
        "CVE-2015-4093", "CVE-2015-1427", "CVE-2019-7611",
    ]
    es_rows = [(i, 6.8, "cve", False) for i in es_ids] + NON_CVE
    es_host = host_xml("10.0.2.15", t0, [
        port_xml(9200, "http", "Elasticsearch REST API", "1.1.1", cpe="cpe:/a:elasticsearch:elasticsearch:1.1.1",
                 rows=es_rows),
    ], os_matches=[("Microsoft Windows Server 2008 R2 SP1", 96)])
    (out / "elasticsearch.xml").write_text(
        nmaprun("nmap -Pn -n -sV --script vulners -p 9200 -oX - 10.0.2.15", t0, [es_host]), encoding="utf-8"
    )

    blue = host_xml("10.10.10.40", t0 + 3600, [
        port_xml(135, "msrpc", "Microsoft Windows RPC", cpe="cpe:/o:microsoft:windows"),
        port_xml(139, "netbios-ssn", "Microsoft Windows netbios-ssn", cpe="cpe:/o:microsoft:windows"),
        port_xml(445, "microsoft-ds", "Microsoft Windows 7 - 10 microsoft-ds", extrainfo="workgroup: WORKGROUP",
                 cpe="cpe:/o:microsoft:windows_7::sp1",
                 rows=cve_rows("CVE-2017-0143", "CVE-2017-0144", "CVE-2017-0145", "CVE-2017-0146",
                               "CVE-2017-0147", "CVE-2017-0148", extra=[("MS17-010", 9.3, "msbulletin", False)])),
    ], os_matches=[("Microsoft Windows 7 Professional SP1", 100)])
    (out / "smb_blue.xml").write_text(
        nmaprun("nmap -Pn -n -sV --script vulners -p 135,139,445 -oX - 10.10.10.40", t0 + 3600, [blue]),
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# exploit index and mirror

EXPLOITS = [
    # id, file, description, date, author, type, platform, verified, codes
    (33588, "exploits/java/remote/33588.rb", "ElasticSearch - Dynamic Script Arbitrary Java Execution (Metasploit)",
     "2014-06-02", "Metasploit", "remote", "java", 1, "CVE-2014-3120;OSVDB-106949"),
    (33370, "exploits/linux/remote/33370.html", "ElasticSearch - Remote Code Execution",
     "2014-05-15", "Alex Brasetvik", "remote", "linux", 1, "CVE-2014-3120"),
    (36337, "exploits/java/webapps/36337.py", "ElasticSearch 1.3.0 < 1.3.7 / 1.4.0 < 1.4.2 - Remote Code Execution",
     "2015-03-11", "Xiphos Research", "webapps", "java", 0, "CVE-2015-1427"),
    (36415, "exploits/java/remote/36415.rb", "ElasticSearch - Search Groovy Sandbox Bypass (Metasploit)",
     "2015-03-16", "Metasploit", "remote", "java", 1, "CVE-2015-1427;OSVDB-118239"),
    (42031, "exploits/windows/remote/42031.py",
     "Microsoft Windows 7/2008 R2 - 'EternalBlue' SMB Remote Code Execution (MS17-010)",
     "2017-05-17", "sleepya", "remote", "windows", 1, "CVE-2017-0144"),
    (42315, "exploits/windows/remote/42315.py",
     "Microsoft Windows 7/8.1/2008 R2/2012 R2/2016 R2 - 'EternalBlue' SMB Remote Code Execution (MS17-010)",
     "2017-07-11", "sleepya", "remote", "windows", 1, "CVE-2017-0144"),
    (41891, "exploits/windows/remote/41891.rb",
     "Microsoft Windows 7/2008 R2 (x64) - 'EternalBlue' SMB Remote Code Execution (MS17-010) (Metasploit)",
     "2017-04-17", "Metasploit", "remote", "windows", 1, "CVE-2017-0144;CVE-2017-0143"),
    (42030, "exploits/windows_x86-64/remote/42030.py",
     "Microsoft Windows 8/8.1/2012 R2 (x64) - 'EternalBlue' SMB Remote Code Execution (MS17-010)",
     "2017-05-17", "sleepya", "remote", "windows_x86-64", 0, "CVE-2017-0144"),
    (43970, "exploits/windows/remote/43970.rb",
     "Microsoft Windows - 'EternalRomance'/'EternalSynergy'/'EternalChampion' SMB Remote Code Execution "
     "(Metasploit) (MS17-010)",
     "2018-02-05", "Metasploit", "remote", "windows", 1, "CVE-2017-0143;CVE-2017-0146;CVE-2017-0147"),
    (49757, "exploits/unix/remote/49757.py", "vsftpd 2.3.4 - Backdoor Command Execution",
     "2021-04-12", "HerculesRD", "remote", "unix", 0, "CVE-2011-2523"),
    (17491, "exploits/unix/remote/17491.rb", "vsftpd 2.3.4 - Backdoor Command Execution (Metasploit)",
     "2011-07-05", "Metasploit", "remote", "unix", 1, "OSVDB-73573"),
    (16320, "exploits/unix/remote/16320.rb",
     "Samba 3.0.20 < 3.0.25rc3 - 'Username' map script' Command Execution (Metasploit)",
     "2010-05-17", "Metasploit", "remote", "unix", 1, "CVE-2007-2447;OSVDB-34700"),
    (9915, "exploits/multiple/remote/9915.rb", "DistCC Daemon - Command Execution (Metasploit)",
     "2010-02-03", "Metasploit", "remote", "multiple", 1, "CVE-2004-2687;OSVDB-13378"),
    (16922, "exploits/linux/remote/16922.rb", "UnrealIRCd 3.2.8.1 - Backdoor Command Execution (Metasploit)",
     "2010-12-05", "Metasploit", "remote", "linux", 1, "CVE-2010-2075;OSVDB-65445"),
    (13853, "exploits/linux/remote/13853.pl", "UnrealIRCd 3.2.8.1 - Remote Downloader/Execute",
     "2010-06-13", "anonymous", "remote", "linux", 1, "CVE-2010-2075"),
    (17696, "exploits/multiple/dos/17696.pl", "Apache - Remote Memory Exhaustion (Denial of Service)",
     "2011-08-19", "Kingcope", "dos", "multiple", 1, "CVE-2011-3192;OSVDB-74721"),
    (18221, "exploits/multiple/dos/18221.c", "Apache HTTP Server 2.x - 'Range' Header Remote Denial of Service",
     "2011-12-09", "Ramon de C Valle", "dos", "multiple", 0, "CVE-2011-3192"),
    (8976, "exploits/multiple/dos/8976.pl",
     "Apache 1.x/2.x - Partial HTTP Request Denial of Service (Slowloris) (CVE-2007-6750)",
     "2009-06-17", "RSnake", "dos", "multiple", 0, ""),
    (34133, "exploits/linux/dos/34133.c", "Apache 2.4.7 mod_status - Scoreboard Handling Race Condition",
     "2014-07-23", "Marek Kroemeke", "dos", "linux", 0, "cve-2014-0226;OSVDB-109216"),
    (36742, "exploits/linux/remote/36742.txt", "ProFTPd 1.3.5 - File Copy",
     "2015-04-13", "anonymous", "remote", "linux", 1, "CVE-2015-3306;OSVDB-120834"),
    (36803, "exploits/linux/remote/36803.py", "ProFTPd 1.3.5 - 'mod_copy' Remote Command Execution",
     "2015-04-21", "R-73eN", "remote", "linux", 0, "CVE-2015-3306"),
    (37262, "exploits/linux/remote/37262.rb", "ProFTPd 1.3.5 - 'mod_copy' Command Execution (Metasploit)",
     "2015-06-10", "Metasploit", "remote", "linux", 1, "CVE-2015-3306;OSVDB-120834"),
    (34900, "exploits/linux/remote/34900.py", "Apache mod_cgi - 'Shellshock' Remote Command Injection",
     "2014-10-06", "Federico Galatolo", "remote", "linux", 1, "CVE-2014-6271;CVE-2014-6278"),
    (34766, "exploits/linux/remote/34766.php", "GNU Bash - Environment Variable Command Injection (Shellshock)",
     "2014-09-25", "anonymous", "remote", "linux", 0, "CVE-2014-6271"),
    (39569, "exploits/multiple/remote/39569.py", "OpenSSH 7.2p1 - (Authenticated) xauth Command Injection",
     "2016-03-16", "tintinweb", "remote", "multiple", 1, "CVE-2016-3115"),
    (40136, "exploits/linux/remote/40136.py", "OpenSSH 7.2p2 - Username Enumeration",
     "2016-07-18", "Eddie Harari", "remote", "linux", 1, "CVE-2016-6210"),
    (40839, "exploits/linux/local/40839.c",
     "Linux Kernel 2.6.22 < 3.9 - 'Dirty COW' 'PTRACE_POKEDATA' Race Condition Privilege Escalation "
     "(/etc/passwd Method)",
     "2016-11-28", "FireFart", "local", "linux", 1, "CVE-2016-5195"),
]
BROKEN_ROWS = [
    ("n/a", "exploits/unknown/x.txt", "Row without a numeric id", "2020-01-01", "nobody", "remote", "linux", 0, ""),
]

NOTE = "Offline fixture. Placeholder body: the original proof-of-concept code is not included."


def placeholder(exploit_id, path, title):
    ext = Path(path).suffix
    if ext == ".rb":
        return (
            "##\n# This module requires Metasploit: https://metasploit.com/download\n##\n\n"
            "require 'msf/core'\n\n"
            "class MetasploitModule < Msf::Exploit::Remote\n"
            "  Rank = GreatRanking\n\n"
            "  def initialize(info = {})\n"
            f"    super(update_info(info, 'Name' => {title!r}, 'Description' => {NOTE!r}))\n"
            "  end\nend\n"
        )
    if ext == ".py":
        return f"#!/usr/bin/env python\n# Exploit Title: {title}\n# EDB-ID: {exploit_id}\n# {NOTE}\n\nprint('placeholder')\n"
    if ext == ".pl":
        return f"#!/usr/bin/perl\n# {title}\n# EDB-ID: {exploit_id}\n# {NOTE}\nprint \"placeholder\\n\";\n"
    if ext == ".php":
        return f"<?php\n// {title}\n// EDB-ID: {exploit_id}\n// {NOTE}\necho \"placeholder\";\n?>\n"
    if ext == ".c":
        name = Path(path).name
        compile_line = {
            "18221.c": f"Compile: gcc -O2 -Wall -o range_dos {name} -lpthread",
            "34133.c": f"gcc -m32 -std=c99 {name} -o mod_status_race",
            "40839.c": f"Compile with: gcc -pthread {name} -o dirty -lcrypt",
        }[name]
        return (
            f"/*\n * {title}\n * EDB-ID: {exploit_id}\n *\n * {compile_line}\n *\n * {NOTE}\n */\n"
            "#include <stdio.h>\n\nint main(void)\n{\n    puts(\"placeholder\");\n    return 0;\n}\n"
        )
    if ext == ".html":
        return f"<html>\n<!-- {title} / EDB-ID: {exploit_id} -->\n<body><p>{NOTE}</p></body>\n</html>\n"
    return f"{title}\nEDB-ID: {exploit_id}\n\n{NOTE}\n"


def write_exploitdb():
    out = DATA / "exploitdb"
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "file", "description", "date", "author", "type", "platform", "verified", "codes"])
    for row in EXPLOITS[:12] + BROKEN_ROWS + EXPLOITS[12:]:
        writer.writerow(row)
    (out / "files_exploits.csv").write_text(buf.getvalue(), encoding="utf-8")
    for exploit_id, path, title, *_ in EXPLOITS:
        dest = out / "mirror" / path
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(placeholder(exploit_id, path, title), encoding="utf-8")


if __name__ == "__main__":
    write_nvd_cache()
    write_scans()
    write_exploitdb()
    print(f"fixtures written under {DATA}")
