// token63 appears in this comment only
var source63 = "token63 inside string";
var pattern63 = /token63+/g;
var tpl63 = `token63 ${ hidden63 } text`;
var ratio63 = total63 / count63;
label63: for (var k63 = 0; k63 < 3; k63++) {
  break label63;
}
