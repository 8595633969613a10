"""Twenty synthetic Puppet scripts with hand-counted property vectors.

Every expected count below was tallied by hand from the script text; the
extractor is never consulted when maintaining this table. Vector order:
attribute, command, comment, ensure, file, file_mode, hard_coded_string,
include, lines_of_code, require, ssh_key, url.
"""

CORPUS = [
    ("s01_empty.pp",
     "",
     (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0)),

    ("s02_ntp.pp",
     "# configure ntp\n"
     "file { '/etc/ntp.conf':\n"
     "  ensure => present,\n"
     "  mode   => '0644',\n"
     "}\n"
     "include ntp",
     (2, 0, 1, 1, 1, 1, 2, 1, 6, 0, 0, 0)),

    ("s03_source.pp",
     "$src = 'https://example.org/p.tgz'\n"
     "require apache",
     (0, 0, 0, 0, 0, 0, 1, 0, 2, 1, 0, 1)),

    ("s04_comments_blank.pp",
     "# header\n"
     "\n"
     "# footer",
     (0, 0, 2, 0, 0, 0, 0, 0, 2, 0, 0, 0)),

    ("s05_keywords_in_strings.pp",
     "$a = 'ensure => present'\n"
     "$b = \"file include require\"\n"
     "$c = '# not comment'",
     (0, 0, 0, 0, 0, 0, 3, 0, 3, 0, 0, 0)),

    ("s06_block_comment.pp",
     "/* multi\n"
     "line comment with ensure file mode\n"
     "*/\n"
     "include stdlib",
     (0, 0, 1, 0, 0, 0, 0, 1, 4, 0, 0, 0)),

    ("s07_case.pp",
     "Ensure => 'x'\n"
     "CMD cmd Cmd\n"
     "File { mode => 1 }",
     (2, 3, 0, 0, 0, 1, 1, 0, 3, 0, 0, 0)),

    ("s08_ssh.pp",
     "ssh_authorized_key { 'deploy':\n"
     "  ensure => present,\n"
     "  key    => 'AAAA',\n"
     "}\n"
     "ssh_authorized_key { 'backup': ensure => absent }",
     (3, 0, 0, 2, 0, 0, 3, 0, 5, 0, 2, 0)),

    ("s09_urls.pp",
     "# see https://docs.example.com/guide\n"
     "$u = \"http://mirror.example.org/pkg\"\n"
     "wget http://bare.example.net/x",
     (0, 0, 1, 0, 0, 0, 1, 0, 3, 0, 0, 3)),

    ("s10_namespaced.pp",
     "include ntp::install\n"
     "include ntp::config\n"
     "class { 'apache': }",
     (0, 0, 0, 0, 0, 0, 1, 2, 3, 0, 0, 0)),

    ("s11_require.pp",
     "package { 'git':\n"
     "  require => File['/etc/a'],\n"
     "}\n"
     "require apache::mod",
     (1, 0, 0, 0, 0, 0, 2, 0, 4, 2, 0, 0)),

    ("s12_escapes.pp",
     "$a = 'it\\'s ensure'\n"
     "$b = \"say \\\"file\\\" twice\"",
     (0, 0, 0, 0, 0, 0, 2, 0, 2, 0, 0, 0)),

    ("s13_files.pp",
     "file { '/tmp/a': }\n"
     "file { '/tmp/b':\n"
     "  mode => '0755',\n"
     "  ensure => file,\n"
     "}",
     (2, 0, 0, 1, 3, 1, 3, 0, 5, 0, 0, 0)),

    ("s14_unterminated_string.pp",
     "$bad = 'oops\n"
     "ensure => present",
     (0, 0, 0, 0, 0, 0, 1, 0, 2, 0, 0, 0)),

    ("s15_unterminated_comment.pp",
     "include one\n"
     "/* starts here\n"
     "ensure => x",
     (0, 0, 1, 0, 0, 0, 0, 1, 3, 0, 0, 0)),

    ("s16_operators.pp",
     "$x = 5\n"
     "$y == 6\n"
     "$z => 7\n"
     "a = b",
     (1, 0, 0, 0, 0, 0, 0, 0, 4, 0, 0, 0)),

    ("s17_cmd.pp",
     "exec { 'run':\n"
     "  cmd => '/bin/true',\n"
     "  command => 'echo hi',\n"
     "}",
     (2, 1, 0, 0, 0, 0, 3, 0, 4, 0, 0, 0)),

    ("s18_class.pp",
     "# manage the web tier\n"
     "class web (\n"
     "  $port = 8080,\n"
     ") {\n"
     "  file { '/etc/web.conf':\n"
     "    ensure  => present,\n"
     "    mode    => '0640',\n"
     "    content => \"port=${port}\\n\",\n"
     "    require => Package['web'],\n"
     "  }\n"
     "  include web::service\n"
     "  # done\n"
     "}",
     (4, 0, 2, 1, 1, 1, 4, 1, 13, 1, 0, 0)),

    ("s19_whitespace.pp",
     "   \n"
     "\t\t\n"
     "  ",
     (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0)),

    ("s20_lookalikes.pp",
     "ensure_file mode:line include2\n"
     "file_mode => ensure",
     (1, 0, 0, 1, 0, 0, 0, 0, 2, 0, 0, 0)),
]
